// config.hpp — Sweep configuration: JSON file plus command-line overrides

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nesslab/ness.hpp"

namespace nesslab::sweep {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Csv, Json };

std::string to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view s);

// Empty grids mean "not set"; each command substitutes its own defaults.
struct SweepConfig {
    std::vector<int> L_list;
    double J{1.0};
    std::vector<double> alpha_grid;
    std::vector<double> gamma_grid;
    double Gamma{1.0};

    double tolerance{1e-10};
    int max_iterations{500};
    SolveStrategy strategy{SolveStrategy::Auto};

    int workers{1};
    int blas_threads{1};
    std::string cache_dir;  // empty: caching off unless NESSLAB_CACHE_DIR is set
    bool use_cache{true};

    OutputFormat format{OutputFormat::Csv};
    std::string out_path;     // empty: standard output
    std::string summary_path; // scaling / norm-bounds summary JSON
    bool profile{false};
    std::string profile_path;

    // Grids non-empty where set, tolerance in (0, 1e-4], workers >= 1, and
    // physical ranges. Throws ConfigError.
    void validate() const;
};

// Strict: unknown sections or keys are errors.
void apply_json(SweepConfig& cfg, const nlohmann::json& j);
SweepConfig load_config(const std::filesystem::path& path);

// "a,b,c" or "start:stop:step" (inclusive of stop within half a step).
// Range values are rounded to 12 significant digits so 0.1-steps land on
// their decimal values.
std::vector<double> parse_real_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

// Cache directory after the NESSLAB_CACHE_DIR override; empty when disabled.
std::filesystem::path resolve_cache_dir(const SweepConfig& cfg);

} // namespace nesslab::sweep
