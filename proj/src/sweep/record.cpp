// record.cpp — ResultRecord serialization

#include "nesslab/sweep/record.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nesslab::sweep {

using nlohmann::json;

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, p);
}

namespace {

std::string opt(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

json opt_json(const std::optional<double>& v)
{
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

json real_json(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::optional<double> opt_from(const json& j, const char* key)
{
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

} // namespace

std::string to_csv_row(const ResultRecord& r)
{
    std::string s;
    s += std::to_string(r.L);
    s += ',' + format_double(r.alpha);
    s += ',' + format_double(r.gamma);
    s += ',' + format_double(r.Gamma);
    s += ',' + opt(r.J_ness);
    s += ',' + opt(r.R_ness);
    s += ',' + opt(r.n_first);
    s += ',' + opt(r.n_last);
    s += r.converged ? ",true" : ",false";
    s += ',' + std::to_string(r.iterations);
    s += ',' + format_double(r.residual);
    s += ',' + format_double(r.wall_time_s);
    s += ',' + r.config_hash;
    return s;
}

json to_json(const ResultRecord& r)
{
    // nlohmann::json writes doubles with round-trip precision.
    return json{
        {"L", r.L},
        {"alpha", r.alpha},
        {"gamma", r.gamma},
        {"Gamma", r.Gamma},
        {"J_ness", opt_json(r.J_ness)},
        {"R_ness", opt_json(r.R_ness)},
        {"n_first", opt_json(r.n_first)},
        {"n_last", opt_json(r.n_last)},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"residual", real_json(r.residual)},
        {"wall_time_s", real_json(r.wall_time_s)},
        {"code_version", r.code_version},
        {"config_hash", r.config_hash},
    };
}

ResultRecord record_from_json(const json& j)
{
    ResultRecord r;
    r.L = j.at("L").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.Gamma = j.at("Gamma").get<double>();
    r.J_ness = opt_from(j, "J_ness");
    r.R_ness = opt_from(j, "R_ness");
    r.n_first = opt_from(j, "n_first");
    r.n_last = opt_from(j, "n_last");
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.residual = opt_from(j, "residual").value_or(std::nan(""));
    r.wall_time_s = opt_from(j, "wall_time_s").value_or(0.0);
    r.code_version = j.at("code_version").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    return r;
}

std::string records_to_csv(const std::vector<ResultRecord>& rows)
{
    std::string s(kCsvHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += to_csv_row(r);
        s += '\n';
    }
    return s;
}

json records_to_json(const std::vector<ResultRecord>& rows)
{
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    return arr;
}

} // namespace nesslab::sweep
