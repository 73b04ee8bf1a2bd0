// operator_norm.cpp — Current-operator norm bound sums

#include "nesslab/operator_norm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "nesslab/regression.hpp"

namespace nesslab {

namespace {

void check_args(int L, double alpha)
{
    if (L < 2) throw std::domain_error("bound_sums: L must be >= 2");
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw std::domain_error("bound_sums: alpha must be finite and >= 0");
    }
}

// table[r] = r^-power for r = 1..n (index 0 unused)
std::vector<double> power_table(int n, double power)
{
    std::vector<double> t(static_cast<std::size_t>(n) + 1, 0.0);
    for (int r = 1; r <= n; ++r) t[r] = std::pow(static_cast<double>(r), -power);
    return t;
}

double row_sum(const std::vector<double>& u, int L, int j)
{
    CompensatedSum s;
    for (int k = 1; k <= L - 1; ++k) {
        if (k != j) s.add(u[std::abs(j - k)]);
    }
    return s.value();
}

} // namespace

double shifted_row_sum(int L, double alpha, int j)
{
    check_args(L, alpha);
    if (j < 1 || j > L - 1) throw std::domain_error("shifted_row_sum: j outside [1, L-1]");
    return row_sum(power_table(L, 2.0 * alpha), L, j);
}

NormBoundReport bound_sums(int L, double alpha)
{
    check_args(L, alpha);
    NormBoundReport r;
    r.L = L;
    r.alpha = alpha;

    const std::vector<double> t = power_table(L, alpha);       // |j-L|^-alpha
    const std::vector<double> u = power_table(L, 2.0 * alpha); // |j-k|^-2alpha

    CompensatedSum direct;
    for (int j = 1; j <= L - 1; ++j) direct.add(t[L - j]);
    r.s_direct = direct.value();

    CompensatedSum dbl;
    for (int j = 1; j <= L - 1; ++j) {
        for (int k = 1; k <= L - 1; ++k) dbl.add(t[L - j] * t[L - k]);
    }
    r.s_double = std::sqrt(dbl.value());

    CompensatedSum inner, outer;
    for (int j = 1; j <= L - 1; ++j) {
        const double row = row_sum(u, L, j);
        inner.add(row);
        outer.add(std::sqrt(row));
    }
    r.s_shifted_inner = std::sqrt(inner.value());
    r.s_shifted_outer = outer.value();

    if (alpha > 0.5 && std::abs(alpha - 1.5) > 1e-6) r.asymptotic = asymptotic_bound(L, alpha);
    return r;
}

double asymptotic_bound(int L, double alpha)
{
    if (L < 2) throw std::domain_error("asymptotic_bound: L must be >= 2");
    if (!(alpha > 0.5)) {
        throw std::domain_error("asymptotic_bound: requires alpha > 0.5");
    }
    if (std::abs(alpha - 1.5) <= 1e-6) {
        throw std::domain_error("asymptotic_bound: undefined at alpha = 1.5");
    }
    const double Ld = static_cast<double>(L);
    const double a2 = 2.0 * alpha - 1.0;
    const double first = std::sqrt((1.0 - std::pow(Ld, 1.0 - 2.0 * alpha)) / a2);
    const double second = std::pow(Ld, 1.5 - alpha) / (std::sqrt(a2) * (1.5 - alpha));
    return first + second;
}

bool inequality_chain_holds(const NormBoundReport& r, double slack)
{
    auto leq = [slack](double a, double b) { return a <= b + slack * std::max(1.0, std::abs(b)); };
    const bool identity = leq(r.s_direct, r.s_double) && leq(r.s_double, r.s_direct);
    return identity && leq(r.s_double, r.s_shifted_inner) && leq(r.s_shifted_inner, r.s_shifted_outer);
}

std::string to_string(BoundQuantity q)
{
    switch (q) {
    case BoundQuantity::Direct: return "s_direct";
    case BoundQuantity::Double: return "s_double";
    case BoundQuantity::ShiftedInner: return "s_shifted_inner";
    case BoundQuantity::ShiftedOuter: return "s_shifted_outer";
    case BoundQuantity::Asymptotic: return "asymptotic";
    }
    return "unknown";
}

double bound_value(const NormBoundReport& r, BoundQuantity q)
{
    switch (q) {
    case BoundQuantity::Direct: return r.s_direct;
    case BoundQuantity::Double: return r.s_double;
    case BoundQuantity::ShiftedInner: return r.s_shifted_inner;
    case BoundQuantity::ShiftedOuter: return r.s_shifted_outer;
    case BoundQuantity::Asymptotic:
        if (!r.asymptotic) throw std::domain_error("bound_value: asymptotic form undefined");
        return *r.asymptotic;
    }
    throw std::invalid_argument("bound_value: unknown quantity");
}

ExponentFit norm_scaling_exponent(double alpha, std::span<const int> L_list, BoundQuantity quantity)
{
    if (!(alpha > 0.5)) throw std::domain_error("norm_scaling_exponent: requires alpha > 0.5");
    const std::set<int> distinct(L_list.begin(), L_list.end());
    if (distinct.size() < 4) {
        throw std::invalid_argument("norm_scaling_exponent: need at least four distinct sizes");
    }
    std::vector<double> x, y;
    for (int L : distinct) {
        const double v = quantity == BoundQuantity::Asymptotic
            ? asymptotic_bound(L, alpha)
            : bound_value(bound_sums(L, alpha), quantity);
        if (!(v > 0.0)) throw std::runtime_error("norm_scaling_exponent: non-positive bound value");
        x.push_back(std::log(static_cast<double>(L)));
        y.push_back(std::log(v));
    }
    const LineFit f = fit_line(x, y);
    return {f.slope, f.stderr_slope};
}

} // namespace nesslab
