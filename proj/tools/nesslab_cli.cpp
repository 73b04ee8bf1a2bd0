// nesslab_cli.cpp — Command-line front end for the steady-state solver

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nesslab/ness.hpp"
#include "nesslab/sweep/commands.hpp"
#include "nesslab/sweep/config.hpp"
#include "nesslab/version.hpp"

namespace {

using namespace nesslab;
using namespace nesslab::sweep;

// Flag values as typed; only the ones actually given override the config.
struct Flags {
    std::string config;
    std::string out;
    std::string summary;
    std::string profile_out;
    std::string format;
    std::string strategy;
    std::string cache_dir;
    std::string L;
    std::string alpha;
    std::string gamma;
    double J{1.0};
    double Gamma{1.0};
    double tolerance{1e-10};
    int max_iterations{500};
    int workers{1};
    int blas_threads{1};
    bool no_cache{false};
    bool profile{false};
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON configuration file");
    sub->add_option("--out", f.out, "Output data file (default: standard output)");
    sub->add_option("--format", f.format, "Output format: csv or json");
    sub->add_option("--workers", f.workers, "Concurrent solves");
    sub->add_option("--blas-threads", f.blas_threads, "Threads inside the LAPACK backend");
    sub->add_option("-L,--L", f.L, "System size(s): n, a,b,c or start:stop:step");
    sub->add_option("--alpha", f.alpha, "Hopping exponent(s): list or start:stop:step");
    sub->add_option("--gamma", f.gamma, "Dephasing rate(s): list or start:stop:step");
    sub->add_option("--J", f.J, "Hopping prefactor");
    sub->add_option("--Gamma", f.Gamma, "Lead coupling");
    sub->add_option("--tolerance", f.tolerance, "Self-consistency tolerance");
    sub->add_option("--max-iterations", f.max_iterations, "Iteration cap for the iterative solvers");
    sub->add_option("--strategy", f.strategy, "auto, krylov, explicit or fixed-point");
    sub->add_option("--cache-dir", f.cache_dir, "Result cache directory");
    sub->add_flag("--no-cache", f.no_cache, "Ignore the result cache");
}

bool given(const CLI::App* sub, const char* name)
{
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

SweepConfig build_config(const CLI::App* sub, const Flags& f)
{
    SweepConfig cfg = f.config.empty() ? SweepConfig{} : load_config(f.config);
    if (given(sub, "--out")) cfg.out_path = f.out;
    if (given(sub, "--summary")) cfg.summary_path = f.summary;
    if (given(sub, "--format")) cfg.format = parse_output_format(f.format);
    if (given(sub, "--workers")) cfg.workers = f.workers;
    if (given(sub, "--blas-threads")) cfg.blas_threads = f.blas_threads;
    if (given(sub, "--L")) cfg.L_list = parse_int_list(f.L);
    if (given(sub, "--alpha")) cfg.alpha_grid = parse_real_list(f.alpha);
    if (given(sub, "--gamma")) cfg.gamma_grid = parse_real_list(f.gamma);
    if (given(sub, "--J")) cfg.J = f.J;
    if (given(sub, "--Gamma")) cfg.Gamma = f.Gamma;
    if (given(sub, "--tolerance")) cfg.tolerance = f.tolerance;
    if (given(sub, "--max-iterations")) cfg.max_iterations = f.max_iterations;
    if (given(sub, "--strategy")) {
        try {
            cfg.strategy = parse_solve_strategy(f.strategy);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (given(sub, "--cache-dir")) cfg.cache_dir = f.cache_dir;
    if (f.no_cache) cfg.use_cache = false;
    if (given(sub, "--profile")) cfg.profile = f.profile;
    if (given(sub, "--profile-out")) {
        cfg.profile = true;
        cfg.profile_path = f.profile_out;
    }
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states of dephasing long-range chains between two leads"};
    app.set_version_flag("--version", std::string(code_version()));
    app.require_subcommand(1);

    Flags flags;
    auto* ness = app.add_subcommand("ness", "Solve one parameter point");
    auto* sweep_gamma = app.add_subcommand("sweep-gamma", "Current against dephasing rate per alpha");
    auto* heatmap = app.add_subcommand("heatmap", "Current over an alpha x gamma grid");
    auto* scaling = app.add_subcommand("scaling", "Resistance against system size, with fits");
    auto* norm_bounds = app.add_subcommand("norm-bounds", "Current-operator norm bound sums");
    auto* oracle_check = app.add_subcommand("oracle-check", "Compare the solver with the exact Liouvillian");
    for (auto* sub : {ness, sweep_gamma, heatmap, scaling, norm_bounds, oracle_check}) add_common(sub, flags);
    ness->add_flag("--profile", flags.profile, "Also write site_index,density,site_in_current");
    ness->add_option("--profile-out", flags.profile_out, "Density profile file (implies --profile)");
    scaling->add_option("--summary", flags.summary, "Fit summary JSON file");
    norm_bounds->add_option("--summary", flags.summary, "Exponent summary JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    SweepConfig cfg;
    try {
        cfg = build_config(sub, flags);
        set_blas_threads(cfg.blas_threads);
    } catch (const std::exception& e) {
        std::cerr << sub->get_name() << ": configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (sub == ness) return cmd_ness(cfg, std::cout, std::cerr);
    if (sub == sweep_gamma) return cmd_sweep_gamma(cfg, std::cout, std::cerr);
    if (sub == heatmap) return cmd_heatmap(cfg, std::cout, std::cerr);
    if (sub == scaling) return cmd_scaling(cfg, std::cout, std::cerr);
    if (sub == norm_bounds) return cmd_norm_bounds(cfg, std::cout, std::cerr);
    return cmd_oracle_check(cfg, std::cout, std::cerr);
}
