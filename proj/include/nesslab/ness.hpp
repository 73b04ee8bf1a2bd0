// ness.hpp — Exact non-equilibrium steady state of the dephased chain
//
// The steady state solves  -i (Heff C - C Heff^dagger) + P(x) = 0  with
// P(x) = diag(gamma x + Gamma e_L) and x = diag(C). In the bi-orthogonal
// eigenbasis of Heff the Lyapunov part is diagonal:
//
//     C = PhiR Ct PhiR^dagger,   Ct(p, q) = [PhiL^dagger P PhiL](p, q) / (i (lambda_p - conj(lambda_q)))
//
// and the diagonal obeys the linear self-consistency (I - gamma M) x = Gamma b
// with M(i, k) = Theta(i, i, k) and b = M e_L.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nesslab/lattice.hpp"
#include "nesslab/lindblad.hpp"

namespace nesslab {

struct BiorthogonalEigensystem {
    Eigen::VectorXcd lambda;
    Eigen::MatrixXcd PhiR; // columns are right eigenvectors
    Eigen::MatrixXcd PhiL; // columns are left eigenvectors, PhiL^dagger PhiR = I

    // Self-checks recorded at construction.
    double biorthogonality_residual{0.0}; // max |PhiL^dagger PhiR - I|
    double reconstruction_residual{0.0};  // ||PhiR diag(lambda) PhiL^dagger - Heff||_F / ||Heff||_F
    double condition_estimate{0.0};       // reciprocal of the LU rcond estimate of PhiR

    Eigen::Index size() const { return lambda.size(); }
};

class EigensystemError : public std::runtime_error {
public:
    EigensystemError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Right eigenvectors from LAPACK zgeev; the left set is the inverse of the
// right eigenvector matrix, so bi-orthonormality holds by construction up to
// the conditioning of PhiR. Throws EigensystemError when the condition
// estimate exceeds 1e12 or either self-check fails (1e-10 / 1e-9).
BiorthogonalEigensystem eigendecompose(const EffectiveHamiltonian& Heff);

// Thread count of the LAPACK backend used by eigendecompose.
void set_blas_threads(int n);

// 1 / (i (lambda_p - conj(lambda_q))). Throws std::domain_error when some
// |lambda_p - conj(lambda_q)| < 1e-12 * scale (no unique steady state).
Eigen::MatrixXcd steady_state_kernel(const Eigen::VectorXcd& lambda, double scale);

// Theta(i, j, k) with 1-based site indices:
//   sum_{p,q} PhiR(i,p) conj(PhiL(k,p)) conj(PhiR(j,q)) PhiL(k,q) / (i (lambda_p - conj(lambda_q)))
// so that C(i, j) = sum_k P(k) Theta(i, j, k) and Theta(., ., k) is positive
// semidefinite. Only available for L <= 128.
std::complex<double> theta(const BiorthogonalEigensystem& eig, int i, int j, int k);

inline constexpr Eigen::Index kThetaMaxSites = 128;

// Stationary C for a fixed diagonal pump (diagonal entries of P).
CorrelationMatrix sylvester_apply(const BiorthogonalEigensystem& eig,
                                  const Eigen::VectorXd& pump);

// Real part of diag(sylvester_apply(eig, pump)), without forming the full C.
Eigen::VectorXd sylvester_apply_diagonal(const BiorthogonalEigensystem& eig,
                                         const Eigen::VectorXd& pump);

// Explicit M(i, k) = Theta(i, i, k). Costs O(L^4); uses M(i, k) = M(k, i),
// which holds because Heff built by build_effective_hamiltonian is complex
// symmetric.
Eigen::MatrixXd self_consistency_matrix(const BiorthogonalEigensystem& eig);

enum class SolveStrategy {
    Auto,       // budgeted GMRES, then explicit M
    Krylov,     // GMRES(restart), then damped fixed point
    Explicit,   // explicit M with a dense Cholesky / LU solve
    FixedPoint, // damped fixed point only
};

std::string to_string(SolveStrategy s);
SolveStrategy parse_solve_strategy(const std::string& name);

struct SolverControls {
    double tolerance{1e-10};
    int max_iterations{500};
    int restart{30};
    double relaxation{0.5};
    SolveStrategy strategy{SolveStrategy::Auto};
};

struct SolverDiagnostics {
    int iterations{0};        // operator applications in the self-consistency solve
    double residual{0.0};     // ||x - (gamma M x + Gamma b)|| / ||x||
    double ness_residual{0.0};// ||dC/dt||_F at the returned C
    double wall_time_s{0.0};
    SolveStrategy path{SolveStrategy::Auto};
    std::vector<double> residual_history;
};

struct NessResult {
    CorrelationMatrix C;
    Eigen::VectorXd density;
    // Entry 0 is the lead in-current Gamma (1 - n_1); entry m-1 for m >= 2 is
    // the coherent in-current from all sites to the left of m.
    Eigen::VectorXd site_in_current;
    Eigen::VectorXd cut_current; // length L-1, positive left to right
    double J_ness{0.0};          // Gamma <n_L>
    double R_ness{0.0};          // 1 / J_ness
    SolverDiagnostics diagnostics;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

private:
    std::vector<double> history_;
};

NessResult solve_ness(const LatticeSpec& spec,
                      const DissipationSpec& diss,
                      const SolverControls& controls = {});

// n_m = 1 - Re C(m, m). Throws std::domain_error for an imaginary residue above
// 1e-10 or a density outside [-1e-9, 1 + 1e-9].
Eigen::VectorXd density_profile(const CorrelationMatrix& C);

// Coherent in-current at site m (1-based, 2 <= m <= L):
//   sum_{r=1}^{m-1} 2 h(r) Im C(m, m-r)
double site_in_current(const CorrelationMatrix& C, const LatticeSpec& spec, int m);

// Gamma (1 - n_1) and Gamma n_L.
double lead_in_current(const CorrelationMatrix& C, const DissipationSpec& diss);
double lead_out_current(const CorrelationMatrix& C, const DissipationSpec& diss);

// Net coherent current across the bond between sites m and m+1 (1-based,
// 1 <= m <= L-1): sum over i <= m < j of 2 h(j-i) Im C(j, i).
double cut_current(const CorrelationMatrix& C, const LatticeSpec& spec, int m);

// All L-1 cut currents in O(L^2).
Eigen::VectorXd cut_currents(const CorrelationMatrix& C, const LatticeSpec& spec);

} // namespace nesslab
