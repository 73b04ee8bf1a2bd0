// lattice.hpp — Long-range hopping chain and its single-particle Hamiltonian

#pragma once

#include <Eigen/Dense>

namespace nesslab {

// Open chain of L sites with hopping J / r^alpha between every pair at
// distance r. alpha = 0 is uniform all-to-all hopping.
struct LatticeSpec {
    int L{2};
    double J{1.0};
    double alpha{1.0};
    // Optional overall scale of the hopping term. Kept at 1 for all physics
    // runs; no Kac-type normalisation is applied anywhere.
    double prefactor{1.0};

    // Throws std::invalid_argument on L < 1, J <= 0, non-finite or negative alpha.
    void validate() const;
};

using HoppingMatrix = Eigen::MatrixXd;

// J / r^alpha for 1 <= r <= L-1; std::domain_error otherwise.
double hopping_amplitude(int r, const LatticeSpec& spec);

// Dense real symmetric L x L matrix with zero diagonal, H(i, j) = J / |i-j|^alpha.
HoppingMatrix build_hamiltonian(const LatticeSpec& spec);

} // namespace nesslab
