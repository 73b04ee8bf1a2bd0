// transport.hpp — System-size scaling of the steady-state resistance

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nesslab/lattice.hpp"
#include "nesslab/lindblad.hpp"

namespace nesslab {

struct ScalingPoint {
    int L{0};
    double J_ness{0.0};
    double R_ness{0.0};
};

struct ScalingSeries {
    double alpha{0.0};
    double gamma{0.0};
    double Gamma{1.0};
    std::vector<ScalingPoint> points;

    // At least four points, strictly increasing L, J_ness > 0 everywhere.
    void validate() const;
};

enum class ScalingModel { Log, Power, Const };

std::string to_string(ScalingModel m);

struct ScalingFit {
    ScalingModel model{ScalingModel::Power};
    // LOG:   R = slope * ln L + intercept
    // POWER: ln R = slope * ln L + intercept   (slope is nu)
    // CONST: ln R = intercept                  (slope fixed at 0)
    double slope{0.0};
    double intercept{0.0};
    double stderr_slope{0.0};
    double stderr_intercept{0.0};
    double r_squared{0.0};
    // Small-sample corrected AIC of the residuals in ln R, so all three
    // models are compared on the same response.
    double aic{0.0};
};

ScalingFit fit_log(const ScalingSeries& series);
ScalingFit fit_powerlaw(const ScalingSeries& series);
ScalingFit fit_const(const ScalingSeries& series);

enum class TransportRegime {
    Diffusive,
    SuperdiffusivePower,
    Subdiffusive,
    SuperdiffusiveLog,
    Ballistic,
};

std::string to_string(TransportRegime r);

struct RegimeClassification {
    TransportRegime regime{TransportRegime::Diffusive};
    ScalingFit winner;
    ScalingFit log;
    ScalingFit power;
    ScalingFit constant;
};

// Lowest AIC wins. CONST winning, or a power-law exponent <= 0.05, is
// BALLISTIC; otherwise LOG -> SUPERDIFFUSIVE_LOG and POWER splits on
// nu < 0.9 / |nu - 1| <= 0.1 / nu > 1.1.
RegimeClassification classify_regime(const ScalingSeries& series);

// Returns J_ness for one parameter point.
using CurrentSolver = std::function<double(const LatticeSpec&, const DissipationSpec&)>;

struct ExponentPoint {
    double alpha{0.0};
    double nu{0.0};
    double stderr{0.0};
    bool ok{false};
    std::string error;
    ScalingSeries series;
};

// Solves every (alpha, L) pair on a pool of `workers` threads and fits
// R ~ L^nu per alpha. Failed points leave ok = false with the message.
std::vector<ExponentPoint> exponent_curve(std::span<const double> alphas,
                                          double gamma,
                                          std::span<const int> L_list,
                                          const CurrentSolver& solver,
                                          int workers = 1,
                                          double Gamma = 1.0,
                                          double J = 1.0);

} // namespace nesslab
