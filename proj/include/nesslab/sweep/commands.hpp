// commands.hpp — The nesslab subcommands as library calls

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "nesslab/lindblad.hpp"
#include "nesslab/ness.hpp"
#include "nesslab/sweep/config.hpp"
#include "nesslab/sweep/record.hpp"

namespace nesslab::sweep {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitSolver = 2,
    kExitValidation = 3,
};

struct GridPoint {
    int L{0};
    double alpha{0.0};
    double gamma{0.0};
};

// Solves every point (cache first), in the given order, on cfg.workers
// threads. Failures come back as converged = false rows.
std::vector<ResultRecord> solve_points(const SweepConfig& cfg, const std::vector<GridPoint>& points,
                                       std::ostream& err);

// Each command writes its data to cfg.out_path (or `out`), diagnostics to
// `err`, and returns an ExitCode. Configuration problems come back as
// kExitConfig rather than exceptions.
int cmd_ness(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep_gamma(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_heatmap(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_scaling(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_norm_bounds(const SweepConfig& cfg, std::ostream& out, std::ostream& err);

using CorrelationSolver =
    std::function<CorrelationMatrix(const LatticeSpec&, const DissipationSpec&)>;

// Default solver is solve_ness with cfg's controls.
int cmd_oracle_check(const SweepConfig& cfg, std::ostream& out, std::ostream& err,
                     const CorrelationSolver& solver = {});

inline constexpr double kOracleTolerance = 1e-8;
inline constexpr int kOracleMaxSites = 5;

} // namespace nesslab::sweep
