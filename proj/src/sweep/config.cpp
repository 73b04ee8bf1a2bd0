// config.cpp — Sweep configuration parsing and validation

#include "nesslab/sweep/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

namespace nesslab::sweep {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

double get_real(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& where)
{
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<int>();
}

std::vector<double> get_real_grid(const json& v, const std::string& where)
{
    if (v.is_number()) return {v.get<double>()};
    if (v.is_string()) return parse_real_list(v.get<std::string>());
    if (!v.is_array()) throw ConfigError(where + ": expected a number, list or range string");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(get_real(e, where));
    return out;
}

std::vector<int> get_int_grid(const json& v, const std::string& where)
{
    if (v.is_number_integer()) return {v.get<int>()};
    if (v.is_string()) return parse_int_list(v.get<std::string>());
    if (!v.is_array()) throw ConfigError(where + ": expected an integer, list or range string");
    std::vector<int> out;
    for (const auto& e : v) out.push_back(get_int(e, where));
    return out;
}

double parse_real(std::string_view s)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
        throw ConfigError("cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

double round_12(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

} // namespace

std::string to_string(OutputFormat f)
{
    return f == OutputFormat::Json ? "json" : "csv";
}

OutputFormat parse_output_format(std::string_view s)
{
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("unknown output format '" + std::string(s) + "' (csv|json)");
}

std::vector<double> parse_real_list(std::string_view text)
{
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
            throw ConfigError("range must be start:stop:step, got '" + std::string(text) + "'");
        }
        const double start = parse_real(text.substr(0, a));
        const double stop = parse_real(text.substr(a + 1, b - a - 1));
        const double step = parse_real(text.substr(b + 1));
        if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("range step must be positive");
        if (stop < start) throw ConfigError("range stop is below start");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
        if (count > 1000000) throw ConfigError("range has too many points");
        for (long i = 0; i < count; ++i) out.push_back(round_12(start + static_cast<double>(i) * step));
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - pos);
        out.push_back(parse_real(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        if (v != std::floor(v) || std::abs(v) > 1e9) {
            throw ConfigError("expected integers in '" + std::string(text) + "'");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void apply_json(SweepConfig& cfg, const json& j)
{
    check_keys(j, "config", {"lattice", "dissipation", "solver", "execution", "output"});
    if (j.contains("lattice")) {
        const auto& s = j["lattice"];
        check_keys(s, "lattice", {"L", "L_list", "J", "alpha", "alpha_grid"});
        if (s.contains("L") && s.contains("L_list")) throw ConfigError("lattice: give L or L_list, not both");
        if (s.contains("alpha") && s.contains("alpha_grid")) {
            throw ConfigError("lattice: give alpha or alpha_grid, not both");
        }
        if (s.contains("L")) cfg.L_list = {get_int(s["L"], "lattice.L")};
        if (s.contains("L_list")) cfg.L_list = get_int_grid(s["L_list"], "lattice.L_list");
        if (s.contains("J")) cfg.J = get_real(s["J"], "lattice.J");
        if (s.contains("alpha")) cfg.alpha_grid = {get_real(s["alpha"], "lattice.alpha")};
        if (s.contains("alpha_grid")) cfg.alpha_grid = get_real_grid(s["alpha_grid"], "lattice.alpha_grid");
    }
    if (j.contains("dissipation")) {
        const auto& s = j["dissipation"];
        check_keys(s, "dissipation", {"gamma", "gamma_grid", "Gamma"});
        if (s.contains("gamma") && s.contains("gamma_grid")) {
            throw ConfigError("dissipation: give gamma or gamma_grid, not both");
        }
        if (s.contains("gamma")) cfg.gamma_grid = {get_real(s["gamma"], "dissipation.gamma")};
        if (s.contains("gamma_grid")) {
            cfg.gamma_grid = get_real_grid(s["gamma_grid"], "dissipation.gamma_grid");
        }
        if (s.contains("Gamma")) cfg.Gamma = get_real(s["Gamma"], "dissipation.Gamma");
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        check_keys(s, "solver", {"tolerance", "max_iterations", "strategy"});
        if (s.contains("tolerance")) cfg.tolerance = get_real(s["tolerance"], "solver.tolerance");
        if (s.contains("max_iterations")) {
            cfg.max_iterations = get_int(s["max_iterations"], "solver.max_iterations");
        }
        if (s.contains("strategy")) {
            if (!s["strategy"].is_string()) throw ConfigError("solver.strategy: expected a string");
            try {
                cfg.strategy = parse_solve_strategy(s["strategy"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (j.contains("execution")) {
        const auto& s = j["execution"];
        check_keys(s, "execution", {"workers", "blas_threads", "cache_dir", "cache"});
        if (s.contains("workers")) cfg.workers = get_int(s["workers"], "execution.workers");
        if (s.contains("blas_threads")) cfg.blas_threads = get_int(s["blas_threads"], "execution.blas_threads");
        if (s.contains("cache_dir")) {
            if (!s["cache_dir"].is_string()) throw ConfigError("execution.cache_dir: expected a string");
            cfg.cache_dir = s["cache_dir"].get<std::string>();
        }
        if (s.contains("cache")) {
            if (!s["cache"].is_boolean()) throw ConfigError("execution.cache: expected a boolean");
            cfg.use_cache = s["cache"].get<bool>();
        }
    }
    if (j.contains("output")) {
        const auto& s = j["output"];
        check_keys(s, "output", {"format", "path", "summary_path", "profile_path"});
        auto str = [&](const char* key) {
            if (!s[key].is_string()) throw ConfigError(std::string("output.") + key + ": expected a string");
            return s[key].get<std::string>();
        };
        if (s.contains("format")) cfg.format = parse_output_format(str("format"));
        if (s.contains("path")) cfg.out_path = str("path");
        if (s.contains("summary_path")) cfg.summary_path = str("summary_path");
        if (s.contains("profile_path")) cfg.profile_path = str("profile_path");
    }
}

SweepConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    SweepConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

void SweepConfig::validate() const
{
    for (int L : L_list) {
        if (L < 1) throw ConfigError("L must be >= 1");
    }
    for (double a : alpha_grid) {
        if (!std::isfinite(a) || a < 0.0) throw ConfigError("alpha must be finite and >= 0");
    }
    for (double g : gamma_grid) {
        if (!std::isfinite(g) || g < 0.0) throw ConfigError("gamma must be finite and >= 0");
    }
    if (!std::isfinite(J)) throw ConfigError("J must be finite");
    if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw ConfigError("Gamma must be positive");
    if (!(tolerance > 0.0) || tolerance > 1e-4) throw ConfigError("tolerance must lie in (0, 1e-4]");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (blas_threads < 1) throw ConfigError("blas_threads must be >= 1");
}

std::filesystem::path resolve_cache_dir(const SweepConfig& cfg)
{
    if (!cfg.use_cache) return {};
    if (const char* env = std::getenv("NESSLAB_CACHE_DIR"); env && *env) return env;
    return cfg.cache_dir;
}

} // namespace nesslab::sweep
