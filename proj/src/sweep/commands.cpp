// commands.cpp — Subcommand drivers over the solver, fits and bound sums

#include "nesslab/sweep/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>

#include "nesslab/operator_norm.hpp"
#include "nesslab/oracle.hpp"
#include "nesslab/parallel.hpp"
#include "nesslab/sweep/cache.hpp"
#include "nesslab/transport.hpp"
#include "nesslab/version.hpp"

namespace nesslab::sweep {

using nlohmann::json;

namespace {

const std::vector<int> kDefaultL{64};
const std::vector<double> kDefaultAlpha{1.0};
const std::vector<double> kDefaultGamma{1.0};

template <class T>
std::vector<T> sorted_unique(const std::vector<T>& v, const std::vector<T>& fallback)
{
    std::vector<T> out = v.empty() ? fallback : v;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SolverControls controls_of(const SweepConfig& cfg)
{
    SolverControls c;
    c.tolerance = cfg.tolerance;
    c.max_iterations = cfg.max_iterations;
    c.strategy = cfg.strategy;
    return c;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback)
{
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

void emit_records(const SweepConfig& cfg, const std::vector<ResultRecord>& rows, std::ostream& out)
{
    if (cfg.format == OutputFormat::Json) {
        write_text(cfg.out_path, records_to_json(rows).dump(2) + "\n", out);
    } else {
        write_text(cfg.out_path, records_to_csv(rows), out);
    }
}

// Summary goes next to the data file, or to the diagnostic stream when the
// data itself went to standard output.
void emit_summary(const SweepConfig& cfg, const json& summary, std::ostream& err)
{
    std::string path = cfg.summary_path;
    if (path.empty() && !cfg.out_path.empty()) path = cfg.out_path + ".summary.json";
    write_text(path, summary.dump(2) + "\n", err);
}

bool any_failed(const std::vector<ResultRecord>& rows)
{
    return std::any_of(rows.begin(), rows.end(), [](const ResultRecord& r) { return !r.converged; });
}

ResultRecord make_record(const SweepConfig& cfg, const GridPoint& p)
{
    ResultRecord r;
    r.L = p.L;
    r.alpha = p.alpha;
    r.gamma = p.gamma;
    r.Gamma = cfg.Gamma;
    r.code_version = code_version();
    r.config_hash = cache_key(p.L, cfg.J, p.alpha, p.gamma, cfg.Gamma, cfg.tolerance, code_version());
    r.residual = std::nan("");
    return r;
}

void fill_from_result(ResultRecord& r, const NessResult& res)
{
    r.J_ness = res.J_ness;
    r.R_ness = res.R_ness;
    r.n_first = res.density(0);
    r.n_last = res.density(res.density.size() - 1);
    r.converged = true;
    r.iterations = res.diagnostics.iterations;
    r.residual = res.diagnostics.residual;
    r.wall_time_s = res.diagnostics.wall_time_s;
}

// Wraps a command body so configuration problems become exit code 1.
template <class Body>
int guarded(std::ostream& err, const char* name, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << name << ": configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << name << ": configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        err << name << ": configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        return kExitSolver;
    }
}

std::vector<GridPoint> grid(const std::vector<int>& Ls, const std::vector<double>& alphas,
                            const std::vector<double>& gammas)
{
    std::vector<GridPoint> pts;
    for (double a : alphas)
        for (double g : gammas)
            for (int L : Ls) pts.push_back({L, a, g});
    return pts;
}

int single_L(const SweepConfig& cfg, const char* name)
{
    const auto Ls = sorted_unique(cfg.L_list, kDefaultL);
    if (Ls.size() != 1) throw ConfigError(std::string(name) + " takes a single L");
    return Ls.front();
}

} // namespace

std::vector<ResultRecord> solve_points(const SweepConfig& cfg, const std::vector<GridPoint>& points,
                                       std::ostream& err)
{
    const ResultCache cache(resolve_cache_dir(cfg));
    const SolverControls controls = controls_of(cfg);
    std::vector<ResultRecord> rows(points.size());
    std::mutex err_mutex;

    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        const GridPoint& p = points[i];
        ResultRecord r = make_record(cfg, p);
        if (auto hit = cache.load(r.config_hash); hit && hit->converged) {
            rows[i] = *hit;
            return;
        }
        try {
            LatticeSpec spec;
            spec.L = p.L;
            spec.J = cfg.J;
            spec.alpha = p.alpha;
            const NessResult res = solve_ness(spec, DissipationSpec{p.gamma, cfg.Gamma}, controls);
            fill_from_result(r, res);
            cache.store(r.config_hash, r);
        } catch (const SolverError& e) {
            if (!e.residual_history().empty()) r.residual = e.residual_history().back();
            std::lock_guard lock(err_mutex);
            err << "solver failure at L=" << p.L << " alpha=" << format_double(p.alpha)
                << " gamma=" << format_double(p.gamma) << ": " << e.what() << '\n';
        } catch (const std::exception& e) {
            std::lock_guard lock(err_mutex);
            err << "failure at L=" << p.L << " alpha=" << format_double(p.alpha)
                << " gamma=" << format_double(p.gamma) << ": " << e.what() << '\n';
        }
        rows[i] = std::move(r);
    });
    return rows;
}

int cmd_ness(const SweepConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, "ness", [&] {
        cfg.validate();
        const int L = single_L(cfg, "ness");
        const auto alphas = sorted_unique(cfg.alpha_grid, kDefaultAlpha);
        const auto gammas = sorted_unique(cfg.gamma_grid, kDefaultGamma);
        if (alphas.size() != 1 || gammas.size() != 1) {
            throw ConfigError("ness takes a single alpha and gamma");
        }
        const GridPoint p{L, alphas.front(), gammas.front()};

        if (!cfg.profile) {
            const auto rows = solve_points(cfg, {p}, err);
            emit_records(cfg, rows, out);
            return any_failed(rows) ? kExitSolver : kExitOk;
        }

        // The profile needs the full correlation matrix, so the cache is
        // bypassed here.
        ResultRecord r = make_record(cfg, p);
        LatticeSpec spec;
        spec.L = p.L;
        spec.J = cfg.J;
        spec.alpha = p.alpha;
        NessResult res;
        try {
            res = solve_ness(spec, DissipationSpec{p.gamma, cfg.Gamma}, controls_of(cfg));
        } catch (const SolverError& e) {
            err << "ness: solver failure: " << e.what() << '\n';
            emit_records(cfg, {r}, out);
            return kExitSolver;
        } catch (const EigensystemError& e) {
            err << "ness: solver failure: " << e.what() << '\n';
            emit_records(cfg, {r}, out);
            return kExitSolver;
        }
        fill_from_result(r, res);
        emit_records(cfg, {r}, out);

        std::string path = cfg.profile_path;
        if (path.empty()) path = cfg.out_path.empty() ? "ness_profile.csv" : cfg.out_path + ".profile.csv";
        std::string text = "site_index,density,site_in_current\n";
        for (Eigen::Index m = 0; m < res.density.size(); ++m) {
            text += std::to_string(m + 1) + ',' + format_double(res.density(m)) + ',' +
                    format_double(res.site_in_current(m)) + '\n';
        }
        write_text(path, text, out);
        return kExitOk;
    });
}

int cmd_sweep_gamma(const SweepConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, "sweep-gamma", [&] {
        cfg.validate();
        const int L = single_L(cfg, "sweep-gamma");
        const auto rows = solve_points(
            cfg, grid({L}, sorted_unique(cfg.alpha_grid, kDefaultAlpha), sorted_unique(cfg.gamma_grid, kDefaultGamma)),
            err);
        emit_records(cfg, rows, out);
        return any_failed(rows) ? kExitSolver : kExitOk;
    });
}

int cmd_heatmap(const SweepConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, "heatmap", [&] {
        cfg.validate();
        if (cfg.alpha_grid.empty() || cfg.gamma_grid.empty()) {
            throw ConfigError("heatmap needs both an alpha grid and a gamma grid");
        }
        const int L = single_L(cfg, "heatmap");
        const auto rows = solve_points(
            cfg, grid({L}, sorted_unique(cfg.alpha_grid, {}), sorted_unique(cfg.gamma_grid, {})), err);
        emit_records(cfg, rows, out);
        return any_failed(rows) ? kExitSolver : kExitOk;
    });
}

int cmd_scaling(const SweepConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, "scaling", [&] {
        cfg.validate();
        const auto Ls = sorted_unique(cfg.L_list, {});
        if (Ls.size() < 4) throw ConfigError("scaling needs at least four distinct system sizes");
        const auto alphas = sorted_unique(cfg.alpha_grid, kDefaultAlpha);
        const auto gammas = sorted_unique(cfg.gamma_grid, kDefaultGamma);
        const auto rows = solve_points(cfg, grid(Ls, alphas, gammas), err);
        emit_records(cfg, rows, out);

        json summary = json::array();
        std::size_t idx = 0;
        for (double a : alphas) {
            for (double g : gammas) {
                ScalingSeries s;
                s.alpha = a;
                s.gamma = g;
                s.Gamma = cfg.Gamma;
                bool complete = true;
                for (std::size_t li = 0; li < Ls.size(); ++li, ++idx) {
                    const auto& r = rows[idx];
                    if (!r.converged) {
                        complete = false;
                        continue;
                    }
                    s.points.push_back({r.L, *r.J_ness, *r.R_ness});
                }
                json item{{"alpha", a}, {"gamma", g}, {"Gamma", cfg.Gamma}};
                if (!complete) {
                    item["ok"] = false;
                    item["error"] = "one or more system sizes failed";
                    summary.push_back(item);
                    continue;
                }
                const auto c = classify_regime(s);
                item["ok"] = true;
                item["regime"] = to_string(c.regime);
                item["model"] = to_string(c.winner.model);
                item["nu"] = c.power.slope;
                item["nu_stderr"] = c.power.stderr_slope;
                item["log_slope"] = c.log.slope;
                item["log_slope_stderr"] = c.log.stderr_slope;
                item["r_squared_log"] = c.log.r_squared;
                item["r_squared_power"] = c.power.r_squared;
                auto aic = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
                item["aic_log"] = aic(c.log.aic);
                item["aic_power"] = aic(c.power.aic);
                item["aic_const"] = aic(c.constant.aic);
                summary.push_back(item);
            }
        }
        emit_summary(cfg, json{{"code_version", code_version()}, {"series", summary}}, err);
        return any_failed(rows) ? kExitSolver : kExitOk;
    });
}

int cmd_norm_bounds(const SweepConfig& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, "norm-bounds", [&] {
        cfg.validate();
        const auto Ls = sorted_unique(cfg.L_list, {500, 1000, 2000, 4000, 6000});
        const auto alphas = sorted_unique(cfg.alpha_grid, parse_real_list("0.6:2.5:0.1"));

        std::vector<NormBoundReport> reports(Ls.size() * alphas.size());
        parallel_for(reports.size(), cfg.workers, [&](std::size_t i) {
            reports[i] = bound_sums(Ls[i % Ls.size()], alphas[i / Ls.size()]);
        });

        bool violation = false;
        std::string csv = "L,alpha,s_direct,s_double,s_shifted_inner,s_shifted_outer,asymptotic,violation\n";
        json arr = json::array();
        for (const auto& r : reports) {
            const bool bad = !inequality_chain_holds(r);
            violation = violation || bad;
            csv += std::to_string(r.L) + ',' + format_double(r.alpha) + ',' + format_double(r.s_direct) + ',' +
                   format_double(r.s_double) + ',' + format_double(r.s_shifted_inner) + ',' +
                   format_double(r.s_shifted_outer) + ',' + (r.asymptotic ? format_double(*r.asymptotic) : "") +
                   (bad ? ",true\n" : ",false\n");
            arr.push_back({{"L", r.L},
                           {"alpha", r.alpha},
                           {"s_direct", r.s_direct},
                           {"s_double", r.s_double},
                           {"s_shifted_inner", r.s_shifted_inner},
                           {"s_shifted_outer", r.s_shifted_outer},
                           {"asymptotic", r.asymptotic ? json(*r.asymptotic) : json(nullptr)},
                           {"violation", bad}});
        }
        if (cfg.format == OutputFormat::Json) {
            write_text(cfg.out_path, arr.dump(2) + "\n", out);
        } else {
            write_text(cfg.out_path, csv, out);
        }

        if (Ls.size() >= 4) {
            json fits = json::array();
            for (double a : alphas) {
                if (a <= 0.5) continue;
                json item{{"alpha", a}};
                const auto outer = norm_scaling_exponent(a, Ls, BoundQuantity::ShiftedOuter);
                item["s_shifted_outer_exponent"] = outer.exponent;
                item["s_shifted_outer_stderr"] = outer.stderr;
                if (std::abs(a - 1.5) > 1e-6) {
                    const auto asym = norm_scaling_exponent(a, Ls, BoundQuantity::Asymptotic);
                    item["asymptotic_exponent"] = asym.exponent;
                    item["asymptotic_stderr"] = asym.stderr;
                } else {
                    item["asymptotic_exponent"] = nullptr;
                    item["asymptotic_stderr"] = nullptr;
                }
                fits.push_back(item);
            }
            emit_summary(cfg, json{{"code_version", code_version()}, {"exponents", fits}}, err);
        }
        if (violation) {
            err << "norm-bounds: inequality violations found\n";
            return kExitValidation;
        }
        return kExitOk;
    });
}

int cmd_oracle_check(const SweepConfig& cfg, std::ostream& out, std::ostream& err,
                     const CorrelationSolver& solver)
{
    return guarded(err, "oracle-check", [&] {
        cfg.validate();
        const auto Ls = sorted_unique(cfg.L_list, {2, 3, 4, 5});
        const auto alphas = sorted_unique(cfg.alpha_grid, {0.5, 1.0, 1.5, 2.0});
        const auto gammas = sorted_unique(cfg.gamma_grid, {0.0, 0.5, 2.0});
        if (Ls.back() > kOracleMaxSites) {
            throw std::domain_error("oracle-check supports L <= " + std::to_string(kOracleMaxSites));
        }
        const SolverControls controls = controls_of(cfg);
        const CorrelationSolver solve = solver ? solver : CorrelationSolver([&](const LatticeSpec& s,
                                                                                const DissipationSpec& d) {
            return solve_ness(s, d, controls).C;
        });

        const auto pts = grid(Ls, alphas, gammas);
        std::vector<double> errors(pts.size(), std::nan(""));
        std::vector<std::string> failures(pts.size());
        parallel_for(pts.size(), cfg.workers, [&](std::size_t i) {
            LatticeSpec spec;
            spec.L = pts[i].L;
            spec.J = cfg.J;
            spec.alpha = pts[i].alpha;
            const DissipationSpec diss{pts[i].gamma, cfg.Gamma};
            try {
                const CorrelationMatrix C = solve(spec, diss);
                const auto ref = oracle::oracle_ness(spec, diss);
                if (C.rows() != ref.C.rows() || C.cols() != ref.C.cols()) {
                    throw std::runtime_error("solver returned a matrix of the wrong size");
                }
                errors[i] = (C - ref.C).cwiseAbs().maxCoeff();
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        });

        bool pass = true;
        bool crashed = false;
        double worst = 0.0;
        std::string csv = "L,alpha,gamma,max_abs_error,pass\n";
        json arr = json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const bool ok = failures[i].empty() && errors[i] <= kOracleTolerance;
            if (!failures[i].empty()) {
                crashed = true;
                err << "oracle-check: L=" << pts[i].L << " alpha=" << format_double(pts[i].alpha)
                    << " gamma=" << format_double(pts[i].gamma) << ": " << failures[i] << '\n';
            } else {
                worst = std::max(worst, errors[i]);
            }
            pass = pass && ok;
            csv += std::to_string(pts[i].L) + ',' + format_double(pts[i].alpha) + ',' +
                   format_double(pts[i].gamma) + ',' + (failures[i].empty() ? format_double(errors[i]) : "") +
                   (ok ? ",true\n" : ",false\n");
            arr.push_back({{"L", pts[i].L},
                           {"alpha", pts[i].alpha},
                           {"gamma", pts[i].gamma},
                           {"max_abs_error", failures[i].empty() ? json(errors[i]) : json(nullptr)},
                           {"pass", ok}});
        }
        if (cfg.format == OutputFormat::Json) {
            write_text(cfg.out_path, arr.dump(2) + "\n", out);
        } else {
            write_text(cfg.out_path, csv, out);
        }
        err << "oracle-check: " << (pass ? "PASS" : "FAIL") << " over " << pts.size()
            << " points, max |C_solver - C_oracle| = " << format_double(worst) << '\n';
        if (crashed) return kExitSolver;
        return pass ? kExitOk : kExitValidation;
    });
}

} // namespace nesslab::sweep
