// test_ness.cpp — Eigensystem, Theta contraction, self-consistency and currents

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "nesslab/lindblad.hpp"
#include "nesslab/ness.hpp"
#include "nesslab/oracle.hpp"

using namespace nesslab;
using cd = std::complex<double>;

namespace {

LatticeSpec chain(int L, double alpha)
{
    LatticeSpec s;
    s.L = L;
    s.alpha = alpha;
    return s;
}

BiorthogonalEigensystem eig_of(const LatticeSpec& s, const DissipationSpec& d)
{
    return eigendecompose(build_effective_hamiltonian(build_hamiltonian(s), d));
}

double max_abs(const Eigen::MatrixXcd& A)
{
    return A.cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("ness") {

TEST_CASE("two-site eigenvalues")
{
    const auto eig = eig_of(chain(2, 1.0), {0.0, 1.0});
    auto ev = eig.lambda;
    if (ev(0).real() > ev(1).real()) std::swap(ev(0), ev(1));
    CHECK(std::abs(ev(0) - cd(-1, -0.5)) < 1e-12);
    CHECK(std::abs(ev(1) - cd(1, -0.5)) < 1e-12);
}

TEST_CASE("bi-orthonormality and reconstruction at L = 64")
{
    const auto s = chain(64, 1.2);
    const DissipationSpec d{0.7, 1.0};
    const auto Heff = build_effective_hamiltonian(build_hamiltonian(s), d);
    const auto eig = eigendecompose(Heff);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(64, 64);
    CHECK(max_abs(eig.PhiL.adjoint() * eig.PhiR - I) < 1e-10);
    CHECK((eig.PhiR * eig.lambda.asDiagonal() * eig.PhiL.adjoint() - Heff).norm() / Heff.norm() < 1e-12);
    CHECK(eig.biorthogonality_residual < 1e-10);
    CHECK(eig.reconstruction_residual < 1e-12);
    CHECK(eig.condition_estimate >= 1.0);
    // Left eigenvectors of Heff are right eigenvectors of Heff^dagger.
    CHECK((Heff.adjoint() * eig.PhiL - eig.PhiL * eig.lambda.conjugate().asDiagonal()).norm() < 1e-10);
}

TEST_CASE("Hermitian input gives a real spectrum and matching left vectors")
{
    Eigen::MatrixXcd A = build_hamiltonian(chain(7, 0.8)).cast<cd>();
    A.diagonal() = Eigen::VectorXcd::LinSpaced(7, -0.3, 0.9); // lift degeneracies
    const auto eig = eigendecompose(A);
    CHECK(eig.lambda.imag().cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index p = 0; p < 7; ++p) {
        // Each PhiL column is parallel to the matching PhiR column.
        const cd overlap = eig.PhiR.col(p).dot(eig.PhiL.col(p));
        CHECK(std::abs(std::abs(overlap) - eig.PhiR.col(p).norm() * eig.PhiL.col(p).norm()) < 1e-10);
    }
}

TEST_CASE("defective matrix is rejected")
{
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(3, 3);
    J(0, 1) = 1.0;
    J(1, 2) = 1.0;
    CHECK_THROWS_AS(eigendecompose(J), EigensystemError);
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXcd(2, 3)), std::invalid_argument);
}

TEST_CASE("all-to-all hopping: (L-2)-fold degenerate bulk eigenvalue")
{
    // At alpha = 0 the plain zgeev vectors of the bulk cluster are numerically
    // dependent from L = 256 on; the cluster basis is rebuilt.
    const auto s = chain(256, 0.0);
    const DissipationSpec d{1.0, 1.0};
    const auto Heff = build_effective_hamiltonian(build_hamiltonian(s), d);
    const auto eig = eigendecompose(Heff);
    CHECK(eig.biorthogonality_residual < 1e-10);
    CHECK(eig.reconstruction_residual < 1e-9);
    Eigen::Index bulk = 0;
    for (Eigen::Index p = 0; p < 256; ++p) bulk += std::abs(eig.lambda(p) - cd(-1.0, -0.5)) < 1e-10;
    CHECK(bulk == 253);

    const auto r = solve_ness(s, d);
    CHECK(r.diagnostics.ness_residual < 1e-10);
    for (Eigen::Index m = 0; m < r.cut_current.size(); ++m) {
        CHECK(std::abs(r.cut_current(m) - r.J_ness) < 1e-8 * r.J_ness);
    }
}

TEST_CASE("kernel rejects a spectrum on the real axis")
{
    Eigen::VectorXcd lam(2);
    lam << cd(1.0, 0.0), cd(-1.0, -0.5);
    CHECK_THROWS_AS(steady_state_kernel(lam, 1.0), std::domain_error);
    lam(0) = cd(1.0, -0.1);
    const auto K = steady_state_kernel(lam, 1.0);
    CHECK(std::abs(K(0, 0) - 1.0 / (cd(0, 1) * (lam(0) - std::conj(lam(0))))) < 1e-14);
    // Hermitian and positive semidefinite.
    CHECK((K - K.adjoint()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
}

TEST_CASE("Theta matches direct quadrature of the propagator at L = 4")
{
    const auto s = chain(4, 1.0);
    const DissipationSpec d{1.0, 1.0};
    const auto Heff = build_effective_hamiltonian(build_hamiltonian(s), d);
    const auto eig = eigendecompose(Heff);

    // Simpson rule over tau in [0, T]; the slowest mode decays well before T.
    const double T = 80.0;
    const int N = 16000;
    const double h = T / N;
    const Eigen::MatrixXcd step = (-cd(0, 1) * h * Heff).exp();
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(4, 4);
    std::vector<Eigen::MatrixXcd> quad(4, Eigen::MatrixXcd::Zero(4, 4));
    for (int n = 0; n <= N; ++n) {
        const double w = (n == 0 || n == N) ? 1.0 : (n % 2 ? 4.0 : 2.0);
        for (int k = 0; k < 4; ++k) quad[k] += w * U.col(k) * U.col(k).adjoint();
        U = step * U;
    }
    for (int k = 0; k < 4; ++k) {
        quad[k] *= h / 3.0;
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) CHECK(std::abs(theta(eig, i, j, k + 1) - quad[k](i - 1, j - 1)) < 1e-9);
        // Theta(., ., k) is a positive semidefinite Hermitian matrix.
        Eigen::MatrixXcd Tk(4, 4);
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) Tk(i - 1, j - 1) = theta(eig, i, j, k + 1);
        CHECK((Tk - Tk.adjoint()).norm() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Tk);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
}

TEST_CASE("Theta solves the Lyapunov equation and checks its indices")
{
    const auto s = chain(6, 1.4);
    const DissipationSpec d{0.3, 0.8};
    const auto Heff = build_effective_hamiltonian(build_hamiltonian(s), d);
    const auto eig = eigendecompose(Heff);
    for (int k = 1; k <= 6; ++k) {
        Eigen::MatrixXcd X(6, 6);
        for (int i = 1; i <= 6; ++i)
            for (int j = 1; j <= 6; ++j) X(i - 1, j - 1) = theta(eig, i, j, k);
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(6, 6);
        E(k - 1, k - 1) = 1.0;
        // Heff X - X Heff^dagger = -i e_k e_k^T
        CHECK(max_abs(Heff * X - X * Heff.adjoint() + cd(0, 1) * E) < 1e-12);
    }
    CHECK_THROWS_AS(theta(eig, 0, 1, 1), std::domain_error);
    CHECK_THROWS_AS(theta(eig, 1, 7, 1), std::domain_error);
    const auto big = eig_of(chain(129, 1.0), {0.5, 1.0});
    CHECK_THROWS_AS(theta(big, 1, 1, 1), std::domain_error);
}

TEST_CASE("sylvester_apply: linearity and agreement with the Theta contraction")
{
    const auto s = chain(3, 1.0);
    const auto eig = eig_of(s, {0.4, 1.0});
    CHECK(max_abs(sylvester_apply(eig, Eigen::VectorXd::Zero(3))) == 0.0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const Eigen::Vector3d P(u(rng), u(rng), u(rng));
    const auto C = sylvester_apply(eig, P);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            cd sum = 0.0;
            for (int k = 1; k <= 3; ++k) sum += P(k - 1) * theta(eig, i, j, k);
            CHECK(std::abs(C(i - 1, j - 1) - sum) < 1e-12);
        }
    const auto diag = sylvester_apply_diagonal(eig, P);
    CHECK((diag - C.diagonal().real()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sylvester_apply reproduces the coherent oracle steady state at L = 4")
{
    const auto s = chain(4, 1.3);
    const DissipationSpec d{0.0, 1.0};
    Eigen::VectorXd P = Eigen::VectorXd::Zero(4);
    P(3) = d.Gamma;
    const auto C = sylvester_apply(eig_of(s, d), P);
    CHECK(max_abs(C - oracle::oracle_ness(s, d).C) < 1e-10);
}

TEST_CASE("self-consistency matrix equals Theta(i, i, k)")
{
    const auto s = chain(9, 0.9);
    const auto eig = eig_of(s, {1.3, 1.0});
    const auto M = self_consistency_matrix(eig);
    CHECK((M - M.transpose()).norm() == 0.0);
    for (int i = 1; i <= 9; ++i)
        for (int k = 1; k <= 9; ++k) {
            const cd t = theta(eig, i, i, k);
            CHECK(std::abs(t.imag()) < 1e-12);
            CHECK(std::abs(M(i - 1, k - 1) - t.real()) < 1e-12);
        }
}

TEST_CASE("single site: half filling and current Gamma / 2")
{
    for (double gamma : {0.0, 0.5, 3.0}) {
        const auto r = solve_ness(chain(1, 1.0), {gamma, 1.6});
        CHECK(r.density(0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(r.J_ness == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(r.R_ness == doctest::Approx(1.25).epsilon(1e-14));
        CHECK(r.cut_current.size() == 0);
    }
}

TEST_CASE("solver agrees with the oracle at L = 5")
{
    const auto s = chain(5, 1.3);
    const DissipationSpec d{0.8, 1.0};
    const auto r = solve_ness(s, d);
    CHECK(max_abs(r.C - oracle::oracle_ness(s, d).C) < 1e-10);
}

TEST_CASE("solution paths agree")
{
    const auto s = chain(48, 1.1);
    const DissipationSpec d{2.0, 1.0};
    SolverControls c;
    c.strategy = SolveStrategy::Explicit;
    const auto ex = solve_ness(s, d, c);
    CHECK(ex.diagnostics.path == SolveStrategy::Explicit);
    c.strategy = SolveStrategy::Krylov;
    const auto kr = solve_ness(s, d, c);
    c.strategy = SolveStrategy::FixedPoint;
    c.max_iterations = 20000;
    c.relaxation = 1.0 / (1.0 + d.gamma);
    // The fixed-point residual is measured on the self-consistency equation,
    // whose condition number amplifies it in C; ask for a tight residual.
    c.tolerance = 1e-13;
    const auto fp = solve_ness(s, d, c);
    c = SolverControls{};
    const auto au = solve_ness(s, d, c);
    CHECK(max_abs(ex.C - kr.C) < 1e-9);
    CHECK(max_abs(ex.C - fp.C) < 1e-9);
    CHECK(max_abs(ex.C - au.C) < 1e-9);
    CHECK(kr.diagnostics.residual_history.size() > 0);
    CHECK(kr.diagnostics.residual <= 1e-10);
}

TEST_CASE("non-convergence reports the residual history")
{
    SolverControls c;
    c.strategy = SolveStrategy::FixedPoint;
    c.max_iterations = 3;
    try {
        solve_ness(chain(32, 1.0), {5.0, 1.0}, c);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.residual_history().size() == 3);
    }
    c.tolerance = -1.0;
    CHECK_THROWS_AS(solve_ness(chain(4, 1.0), {1.0, 1.0}, c), std::invalid_argument);
    CHECK_THROWS_AS(solve_ness(chain(4, 1.0), {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("strategy names round-trip")
{
    for (auto s : {SolveStrategy::Auto, SolveStrategy::Krylov, SolveStrategy::Explicit, SolveStrategy::FixedPoint}) {
        CHECK(parse_solve_strategy(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_solve_strategy("newton"), std::invalid_argument);
}

TEST_CASE("nearest-neighbour limit has a flat half-filled bulk")
{
    const auto r = solve_ness(chain(256, 30.0), {0.0, 1.0});
    for (int m = 10; m < 246; ++m) CHECK(r.density(m) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("density profile edge cases")
{
    CHECK(density_profile(Eigen::MatrixXcd::Identity(3, 3)).norm() == 0.0);
    CHECK((density_profile(Eigen::MatrixXcd::Zero(3, 3)).array() == 1.0).all());
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(2, 2);
    C(0, 0) = -0.5;
    CHECK_THROWS_AS(density_profile(C), std::domain_error);
    C(0, 0) = cd(0.5, 1e-6);
    CHECK_THROWS_AS(density_profile(C), std::domain_error);
}

TEST_CASE("near-linear monotone profile at alpha = 3 and weak dephasing")
{
    const auto r = solve_ness(chain(256, 3.0), {0.05, 1.0});
    for (int m = 1; m < 256; ++m) CHECK(r.density(m) <= r.density(m - 1) + 1e-12);
    // Bulk of the profile is close to a straight line.
    const int a = 32, b = 224;
    const double slope = (r.density(b) - r.density(a)) / (b - a);
    CHECK(slope < 0.0);
    double worst = 0.0;
    for (int m = a; m <= b; ++m) {
        worst = std::max(worst, std::abs(r.density(m) - (r.density(a) + slope * (m - a))));
    }
    CHECK(worst < 0.1 * (r.density(a) - r.density(b)));

    // Stronger dephasing flattens the bulk relative to its drop at the edges.
    const auto strong = solve_ness(chain(256, 3.0), {2.0, 1.0});
    const double weak_bulk = (r.density(a) - r.density(b)) / (r.density(0) - r.density(255));
    const double strong_bulk = (strong.density(a) - strong.density(b)) / (strong.density(0) - strong.density(255));
    CHECK(strong_bulk != doctest::Approx(weak_bulk));
}

TEST_CASE("currents: real C carries none and C = I has no cut current")
{
    const auto s = chain(5, 1.0);
    Eigen::MatrixXd R = Eigen::MatrixXd::Random(5, 5);
    const Eigen::MatrixXcd C = (0.1 * (R + R.transpose())).cast<cd>();
    for (int m = 2; m <= 5; ++m) CHECK(site_in_current(C, s, m) == 0.0);
    CHECK_THROWS_AS(site_in_current(C, s, 1), std::domain_error);
    CHECK_THROWS_AS(site_in_current(C, s, 6), std::domain_error);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(5, 5);
    for (int m = 1; m <= 4; ++m) CHECK(cut_current(I, s, m) == 0.0);
    CHECK_THROWS_AS(cut_current(I, s, 0), std::domain_error);
    CHECK_THROWS_AS(cut_current(I, s, 5), std::domain_error);
}

TEST_CASE("steady-state currents are conserved")
{
    const auto s = chain(100, 1.3);
    const DissipationSpec d{0.9, 1.0};
    const auto r = solve_ness(s, d);
    CHECK(std::abs(r.site_in_current(0) - r.J_ness) <= 1e-8 * r.J_ness);
    for (int m = 1; m <= 99; ++m) {
        CHECK(std::abs(r.cut_current(m - 1) - r.J_ness) <= 1e-8 * r.J_ness);
        CHECK(std::abs(cut_current(r.C, s, m) - r.cut_current(m - 1)) <= 1e-12);
    }
}

TEST_CASE("nearest-neighbour site currents equal the cut and lead currents")
{
    const auto s = chain(40, 30.0);
    const DissipationSpec d{0.5, 1.0};
    const auto r = solve_ness(s, d);
    for (int m = 2; m <= 40; ++m) CHECK(std::abs(r.site_in_current(m - 1) - r.J_ness) < 1e-9 * r.J_ness);
}

TEST_CASE("site currents match the oracle current operator at L = 4")
{
    const auto s = chain(4, 1.0);
    const DissipationSpec d{0.5, 1.0};
    const auto ref = oracle::oracle_ness(s, d);
    const auto ops = oracle::build_fock_operators(4);
    const auto H = build_hamiltonian(s);
    for (int m = 2; m <= 4; ++m) {
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(16, 16);
        for (int k = 0; k < m - 1; ++k) {
            J += cd(0, 1) * H(m - 1, k) * (ops.cdag[k] * ops.c[m - 1] - ops.cdag[m - 1] * ops.c[k]);
        }
        CHECK(std::abs(oracle::expectation(ref.rho, J).real() - site_in_current(ref.C, s, m)) < 1e-10);
    }
}

TEST_CASE("cut currents are unequal in the transient")
{
    const auto s = chain(12, 1.0);
    EvolveControls ctl;
    ctl.t_final = 0.5;
    const auto traj = evolve(Eigen::MatrixXcd::Identity(12, 12), s, {0.5, 1.0}, ctl);
    const auto cuts = cut_currents(traj.final_state, s);
    CHECK(cuts.maxCoeff() - cuts.minCoeff() > 1e-3);
}

}
