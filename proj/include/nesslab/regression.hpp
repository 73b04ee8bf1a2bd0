// regression.hpp — Ordinary least squares and compensated summation helpers

#pragma once

#include <cmath>
#include <span>

namespace nesslab {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double stderr_slope{0.0};
    double stderr_intercept{0.0};
    double r_squared{0.0};
    double rss{0.0};
    int n{0};
};

// y = slope x + intercept. Throws std::invalid_argument on fewer than three
// points, mismatched lengths, non-finite data or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace nesslab
