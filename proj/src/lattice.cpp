// lattice.cpp — Long-range hopping chain construction

#include "nesslab/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nesslab {

void LatticeSpec::validate() const
{
    if (L < 1) {
        throw std::invalid_argument("LatticeSpec: L must be >= 1, got " + std::to_string(L));
    }
    if (!(J > 0.0) || !std::isfinite(J)) {
        throw std::invalid_argument("LatticeSpec: J must be finite and > 0");
    }
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw std::invalid_argument("LatticeSpec: alpha must be finite and >= 0");
    }
    if (!std::isfinite(prefactor) || prefactor <= 0.0) {
        throw std::invalid_argument("LatticeSpec: prefactor must be finite and > 0");
    }
}

namespace {

inline double amplitude_unchecked(int r, const LatticeSpec& spec)
{
    return spec.prefactor * spec.J * std::pow(static_cast<double>(r), -spec.alpha);
}

} // namespace

double hopping_amplitude(int r, const LatticeSpec& spec)
{
    spec.validate();
    if (r < 1 || r > spec.L - 1) {
        throw std::domain_error("hopping_amplitude: distance " + std::to_string(r) +
                                " outside [1, " + std::to_string(spec.L - 1) + "]");
    }
    return amplitude_unchecked(r, spec);
}

HoppingMatrix build_hamiltonian(const LatticeSpec& spec)
{
    spec.validate();
    const Eigen::Index n = spec.L;
    HoppingMatrix H = HoppingMatrix::Zero(n, n);
    // One pow per distance, then scatter along the diagonals.
    for (Eigen::Index r = 1; r < n; ++r) {
        const double t = amplitude_unchecked(static_cast<int>(r), spec);
        for (Eigen::Index i = 0; i + r < n; ++i) {
            H(i, i + r) = t;
            H(i + r, i) = t;
        }
    }
    return H;
}

} // namespace nesslab
