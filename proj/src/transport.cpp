// transport.cpp — Resistance scaling fits, regime labels and nu(alpha)

#include "nesslab/transport.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "nesslab/parallel.hpp"
#include "nesslab/regression.hpp"

namespace nesslab {

namespace {

// Floor on the residual sum of squares so that exact synthetic data does not
// send ln(rss) to -inf. Models that fit to round-off then tie, and the
// parameter penalty decides.
constexpr double kRssFloor = 1e-24;

struct LogData {
    std::vector<double> lnL;
    std::vector<double> R;
    std::vector<double> lnR;
};

LogData unpack(const ScalingSeries& s)
{
    s.validate();
    LogData d;
    for (const auto& p : s.points) {
        d.lnL.push_back(std::log(static_cast<double>(p.L)));
        d.R.push_back(p.R_ness);
        d.lnR.push_back(std::log(p.R_ness));
    }
    return d;
}

// k counts the fitted coefficients. With the variance also counted, the
// small-sample correction is undefined for two-parameter models on the
// minimum of four points.
double aicc(double rss_ln, int n, int k)
{
    const double nn = n;
    const double rss = std::max(rss_ln, kRssFloor);
    return nn * std::log(rss / nn) + 2.0 * k + 2.0 * k * (k + 1) / (nn - k - 1);
}

} // namespace

void ScalingSeries::validate() const
{
    if (points.size() < 4) {
        throw std::invalid_argument("ScalingSeries: need at least four system sizes");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.L < 1) throw std::invalid_argument("ScalingSeries: L must be positive");
        if (i > 0 && p.L <= points[i - 1].L) {
            throw std::invalid_argument("ScalingSeries: L values must be strictly increasing");
        }
        if (!(p.J_ness > 0.0) || !std::isfinite(p.J_ness)) {
            throw std::invalid_argument("ScalingSeries: J_ness must be positive and finite");
        }
        if (!(p.R_ness > 0.0) || !std::isfinite(p.R_ness)) {
            throw std::invalid_argument("ScalingSeries: R_ness must be positive and finite");
        }
    }
}

std::string to_string(ScalingModel m)
{
    switch (m) {
    case ScalingModel::Log: return "LOG";
    case ScalingModel::Power: return "POWER";
    case ScalingModel::Const: return "CONST";
    }
    return "?";
}

std::string to_string(TransportRegime r)
{
    switch (r) {
    case TransportRegime::Diffusive: return "DIFFUSIVE";
    case TransportRegime::SuperdiffusivePower: return "SUPERDIFFUSIVE_POWER";
    case TransportRegime::Subdiffusive: return "SUBDIFFUSIVE";
    case TransportRegime::SuperdiffusiveLog: return "SUPERDIFFUSIVE_LOG";
    case TransportRegime::Ballistic: return "BALLISTIC";
    }
    return "?";
}

ScalingFit fit_log(const ScalingSeries& series)
{
    const LogData d = unpack(series);
    const LineFit lf = fit_line(d.lnL, d.R);
    ScalingFit f;
    f.model = ScalingModel::Log;
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.stderr_slope = lf.stderr_slope;
    f.stderr_intercept = lf.stderr_intercept;
    f.r_squared = lf.r_squared;
    double rss = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < d.R.size(); ++i) {
        const double pred = lf.slope * d.lnL[i] + lf.intercept;
        if (!(pred > 0.0)) {
            positive = false;
            break;
        }
        const double r = d.lnR[i] - std::log(pred);
        rss += r * r;
    }
    f.aic = positive ? aicc(rss, lf.n, 2) : std::numeric_limits<double>::infinity();
    return f;
}

ScalingFit fit_powerlaw(const ScalingSeries& series)
{
    const LogData d = unpack(series);
    const LineFit lf = fit_line(d.lnL, d.lnR);
    ScalingFit f;
    f.model = ScalingModel::Power;
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.stderr_slope = lf.stderr_slope;
    f.stderr_intercept = lf.stderr_intercept;
    f.r_squared = lf.r_squared;
    f.aic = aicc(lf.rss, lf.n, 2);
    return f;
}

// Geometric-mean level, i.e. least squares in ln R with zero slope.
ScalingFit fit_const(const ScalingSeries& series)
{
    const LogData d = unpack(series);
    const int n = static_cast<int>(d.lnR.size());
    CompensatedSum s;
    for (double v : d.lnR) s.add(v);
    const double mean = s.value() / n;
    double rss = 0.0;
    for (double v : d.lnR) rss += (v - mean) * (v - mean);
    ScalingFit f;
    f.model = ScalingModel::Const;
    f.slope = 0.0;
    f.intercept = mean;
    f.stderr_slope = 0.0;
    f.stderr_intercept = std::sqrt(rss / (n - 1.0) / n);
    f.r_squared = 0.0;
    f.aic = aicc(rss, n, 1);
    return f;
}

RegimeClassification classify_regime(const ScalingSeries& series)
{
    RegimeClassification c;
    c.log = fit_log(series);
    c.power = fit_powerlaw(series);
    c.constant = fit_const(series);

    // Ties resolve toward the simpler model, then POWER over LOG.
    c.winner = c.constant;
    if (c.power.aic < c.winner.aic) c.winner = c.power;
    if (c.log.aic < c.winner.aic) c.winner = c.log;

    const double nu = c.power.slope;
    if (c.winner.model == ScalingModel::Const || nu <= 0.05) {
        c.regime = TransportRegime::Ballistic;
    } else if (c.winner.model == ScalingModel::Log) {
        c.regime = TransportRegime::SuperdiffusiveLog;
    } else if (std::abs(nu - 1.0) <= 0.1) {
        c.regime = TransportRegime::Diffusive;
    } else if (nu < 0.9) {
        c.regime = TransportRegime::SuperdiffusivePower;
    } else {
        c.regime = TransportRegime::Subdiffusive;
    }
    return c;
}

std::vector<ExponentPoint> exponent_curve(std::span<const double> alphas,
                                          double gamma,
                                          std::span<const int> L_list,
                                          const CurrentSolver& solver,
                                          int workers,
                                          double Gamma,
                                          double J)
{
    if (!solver) throw std::invalid_argument("exponent_curve: no solver given");
    if (alphas.empty()) throw std::invalid_argument("exponent_curve: empty alpha list");
    if (L_list.size() < 4) {
        throw std::invalid_argument("exponent_curve: need at least four system sizes");
    }
    for (std::size_t i = 1; i < L_list.size(); ++i) {
        if (L_list[i] <= L_list[i - 1]) {
            throw std::invalid_argument("exponent_curve: L list must be strictly increasing");
        }
    }
    if (workers < 1) throw std::invalid_argument("exponent_curve: workers must be >= 1");

    struct Cell {
        double J_ness{0.0};
        std::string error;
        bool ok{false};
    };
    const std::size_t nL = L_list.size();
    std::vector<Cell> cells(alphas.size() * nL);

    // Largest systems first so the slowest tasks do not trail at the end.
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t li = nL; li-- > 0;) {
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) order.emplace_back(ai, li);
    }

    parallel_for(order.size(), workers, [&](std::size_t t) {
        const auto [ai, li] = order[t];
        Cell& cell = cells[ai * nL + li];
        try {
            LatticeSpec spec;
            spec.L = L_list[li];
            spec.alpha = alphas[ai];
            spec.J = J;
            DissipationSpec diss{gamma, Gamma};
            cell.J_ness = solver(spec, diss);
            cell.ok = cell.J_ness > 0.0 && std::isfinite(cell.J_ness);
            if (!cell.ok) cell.error = "non-positive current";
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });

    std::vector<ExponentPoint> out;
    out.reserve(alphas.size());
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        ExponentPoint p;
        p.alpha = alphas[ai];
        p.series.alpha = alphas[ai];
        p.series.gamma = gamma;
        p.series.Gamma = Gamma;
        std::string err;
        for (std::size_t li = 0; li < nL; ++li) {
            const Cell& c = cells[ai * nL + li];
            if (!c.ok) {
                if (err.empty()) err = "L=" + std::to_string(L_list[li]) + ": " + c.error;
                continue;
            }
            p.series.points.push_back({L_list[li], c.J_ness, 1.0 / c.J_ness});
        }
        if (err.empty()) {
            try {
                const ScalingFit f = fit_powerlaw(p.series);
                p.nu = f.slope;
                p.stderr = f.stderr_slope;
                p.ok = true;
            } catch (const std::exception& e) {
                err = e.what();
            }
        }
        p.error = err;
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace nesslab
