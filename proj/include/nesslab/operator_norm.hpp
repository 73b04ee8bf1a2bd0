// operator_norm.hpp — Upper-bound sums for the norm of the current operator
// into the last site, their continuum asymptotics and L-scaling fits.
//
// For a chain of L sites the bound quantities are
//   s_direct        = sum_{j=1}^{L-1} |j-L|^-alpha
//   s_double        = sqrt( sum_{j,k=1}^{L-1} |(j-L)(k-L)|^-alpha )
//   s_shifted_inner = sqrt( sum_j sum_{k != j} |j-k|^-2alpha )
//   s_shifted_outer = sum_j sqrt( sum_{k != j} |j-k|^-2alpha )
// with j, k running over 1..L-1. Empty sums are 0.

#pragma once

#include <optional>
#include <span>
#include <string>

namespace nesslab {

struct NormBoundReport {
    int L{0};
    double alpha{0.0};
    double s_direct{0.0};
    double s_double{0.0};
    double s_shifted_inner{0.0};
    double s_shifted_outer{0.0};
    std::optional<double> asymptotic; // unset where the closed form is undefined
};

NormBoundReport bound_sums(int L, double alpha);

// sum_{k=1, k != j}^{L-1} |j-k|^-2alpha for 1 <= j <= L-1.
double shifted_row_sum(int L, double alpha, int j);

// sqrt((1 - L^(1-2a)) / (2a-1)) + L^(3/2-a) / (sqrt(2a-1) (3/2-a)).
// std::domain_error for alpha <= 0.5 or |alpha - 1.5| <= 1e-6.
double asymptotic_bound(int L, double alpha);

// s_double <= s_shifted_inner <= s_shifted_outer within `slack` (absolute and
// relative), and s_direct == s_double to the same slack.
bool inequality_chain_holds(const NormBoundReport& r, double slack = 1e-12);

enum class BoundQuantity { Direct, Double, ShiftedInner, ShiftedOuter, Asymptotic };

std::string to_string(BoundQuantity q);
double bound_value(const NormBoundReport& r, BoundQuantity q);

struct ExponentFit {
    double exponent{0.0};
    double stderr{0.0};
};

// Least-squares slope of log(quantity) against log L. Requires alpha > 0.5
// and at least four distinct sizes.
ExponentFit norm_scaling_exponent(double alpha,
                                  std::span<const int> L_list,
                                  BoundQuantity quantity = BoundQuantity::ShiftedOuter);

} // namespace nesslab
