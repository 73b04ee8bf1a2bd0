// record.hpp — One solved parameter point and its CSV / JSON forms

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nesslab::sweep {

struct ResultRecord {
    int L{0};
    double alpha{0.0};
    double gamma{0.0};
    double Gamma{1.0};
    // Unset on failed rows.
    std::optional<double> J_ness;
    std::optional<double> R_ness;
    std::optional<double> n_first;
    std::optional<double> n_last;
    bool converged{false};
    int iterations{0};
    double residual{0.0};
    double wall_time_s{0.0};
    std::string code_version;
    std::string config_hash;
};

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

inline constexpr std::string_view kCsvHeader =
    "L,alpha,gamma,Gamma,J_ness,R_ness,n_first,n_last,converged,iterations,residual,wall_time_s,config_hash";

std::string to_csv_row(const ResultRecord& r);
nlohmann::json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

std::string records_to_csv(const std::vector<ResultRecord>& rows);
nlohmann::json records_to_json(const std::vector<ResultRecord>& rows);

} // namespace nesslab::sweep
