// regression.cpp — Ordinary least squares

#include "nesslab/regression.hpp"

#include <algorithm>
#include <stdexcept>

namespace nesslab {

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_line: x and y lengths differ");
    }
    if (x.size() < 3) {
        throw std::invalid_argument("fit_line: need at least three points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("fit_line: non-finite data");
        }
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_line: degenerate abscissae");
    }
    LineFit f;
    f.n = static_cast<int>(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        rss += r * r;
    }
    f.rss = rss;
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - rss / syy, 0.0, 1.0) : 1.0;
    const double sigma2 = rss / (n - 2.0);
    f.stderr_slope = std::sqrt(sigma2 / sxx);
    f.stderr_intercept = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
    return f;
}

} // namespace nesslab
