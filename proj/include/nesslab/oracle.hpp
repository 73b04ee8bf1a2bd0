// oracle.hpp — Brute-force many-body Lindblad steady state for short chains
//
// Used as ground truth for the correlation-matrix machinery. Everything here
// scales as 4^L and is refused above six sites.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nesslab/lattice.hpp"
#include "nesslab/lindblad.hpp"

namespace nesslab::oracle {

inline constexpr int kMaxSites = 6;

// Jordan-Wigner fermions on 2^L dimensional Fock space. Site 0 is the leading
// tensor factor; |0> is empty and |1> occupied.
struct FockOperatorSet {
    int L{0};
    std::vector<Eigen::MatrixXcd> c;
    std::vector<Eigen::MatrixXcd> cdag;
    std::vector<Eigen::MatrixXcd> n;
};

FockOperatorSet build_fock_operators(int L);

// sum_ij H(i,j) c_i^dagger c_j
Eigen::MatrixXcd many_body_hamiltonian(const FockOperatorSet& ops, const HoppingMatrix& H);

// Jump operators sqrt(gamma) n_j, sqrt(Gamma) c_1^dagger, sqrt(Gamma) c_L.
std::vector<Eigen::MatrixXcd> jump_operators(const FockOperatorSet& ops,
                                             const DissipationSpec& diss);

// Column-stacking superoperator
//   -i (I (x) H - H^T (x) I) + sum_mu [conj(L_mu) (x) L_mu - 1/2 I (x) L_mu^dag L_mu
//                                      - 1/2 (L_mu^dag L_mu)^T (x) I]
// acting on vec(rho). Throws std::domain_error for L > 6.
Eigen::MatrixXcd build_liouvillian(const LatticeSpec& spec, const DissipationSpec& diss);

// Same, from explicit many-body pieces (for harnesses with custom generators).
Eigen::MatrixXcd build_liouvillian(const Eigen::MatrixXcd& H_mb,
                                   const std::vector<Eigen::MatrixXcd>& jumps);

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);

// C(n, m) = Tr[rho c_n c_m^dagger]
CorrelationMatrix correlation_from_density_matrix(const FockOperatorSet& ops,
                                                  const Eigen::MatrixXcd& rho);

std::complex<double> expectation(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op);

struct OracleSteadyState {
    Eigen::MatrixXcd rho;
    CorrelationMatrix C;
    double residual{0.0}; // ||L vec(rho)||
};

// Null vector of the Liouvillian, normalised to unit trace and Hermitised.
// Throws std::runtime_error if the null space is not one-dimensional.
OracleSteadyState oracle_ness(const LatticeSpec& spec, const DissipationSpec& diss);

} // namespace nesslab::oracle
