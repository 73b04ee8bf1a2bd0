// test_oracle.cpp — Many-body Liouvillian ground truth

#include <doctest.h>

#include <stdexcept>

#include <Eigen/Eigenvalues>

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

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("fermionic anticommutation relations")
{
    const auto ops = oracle::build_fock_operators(3);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(8, 8);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Eigen::MatrixXcd ac = ops.c[i] * ops.cdag[j] + ops.cdag[j] * ops.c[i];
            CHECK((ac - (i == j ? I : Eigen::MatrixXcd::Zero(8, 8))).norm() < 1e-14);
            CHECK((ops.c[i] * ops.c[j] + ops.c[j] * ops.c[i]).norm() < 1e-14);
        }
    CHECK((ops.n[1] - ops.cdag[1] * ops.c[1]).norm() < 1e-14);
}

TEST_CASE("vectorization round trip is column stacking")
{
    Eigen::MatrixXcd A(2, 2);
    A << 1, 2, 3, 4;
    const auto v = oracle::vectorize(A);
    CHECK(v(1) == cd(3));
    CHECK(v(2) == cd(2));
    CHECK(oracle::unvectorize(v, 2) == A);
}

TEST_CASE("single site: half filling")
{
    const auto r = oracle::oracle_ness(chain(1, 1.0), {0.0, 1.0});
    CHECK(std::abs(r.C(0, 0) - 0.5) < 1e-12);
    const auto ops = oracle::build_fock_operators(1);
    CHECK(oracle::expectation(r.rho, ops.n[0]).real() == doctest::Approx(0.5));
    const auto jumps = oracle::jump_operators(ops, {0.0, 1.0});
    CHECK(jumps.size() == 2);
}

TEST_CASE("pure dephasing leaves diagonal states stationary")
{
    const auto ops = oracle::build_fock_operators(3);
    std::vector<Eigen::MatrixXcd> jumps;
    for (int j = 0; j < 3; ++j) jumps.push_back(std::sqrt(0.7) * ops.n[j]);
    const auto Lv = oracle::build_liouvillian(Eigen::MatrixXcd::Zero(8, 8), jumps);
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(8, 1.0, 8.0);
    const Eigen::MatrixXcd rho = (p / p.sum()).cast<cd>().asDiagonal();
    CHECK((Lv * oracle::vectorize(rho)).norm() < 1e-14);
}

TEST_CASE("unique zero eigenvalue at L = 3")
{
    const auto Lv = oracle::build_liouvillian(chain(3, 1.0), {0.5, 1.0});
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Lv, false);
    int zeros = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cd ev = es.eigenvalues()(i);
        if (std::abs(ev) < 1e-10) {
            ++zeros;
        } else {
            CHECK(ev.real() < 0.0);
        }
    }
    CHECK(zeros == 1);
}

TEST_CASE("Liouvillian preserves the trace")
{
    const auto Lv = oracle::build_liouvillian(chain(3, 1.7), {1.2, 0.6});
    // vec(I)^dagger L = 0
    const Eigen::VectorXcd tr = oracle::vectorize(Eigen::MatrixXcd::Identity(8, 8));
    CHECK((tr.adjoint() * Lv).norm() < 1e-12);
}

TEST_CASE("steady state is a density matrix with conserved current")
{
    const DissipationSpec d{2.0, 1.0};
    const auto r = oracle::oracle_ness(chain(4, 0.8), d);
    CHECK(std::abs(r.rho.trace() - 1.0) < 1e-12);
    CHECK((r.rho - r.rho.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    const auto dens = density_profile(r.C);
    CHECK(dens.minCoeff() >= 0.0);
    CHECK(dens.maxCoeff() <= 1.0);
    const auto ops = oracle::build_fock_operators(4);
    const double in = d.Gamma * (1.0 - oracle::expectation(r.rho, ops.n[0]).real());
    const double out = d.Gamma * oracle::expectation(r.rho, ops.n[3]).real();
    CHECK(std::abs(in - out) < 1e-9);
    CHECK(r.residual < 1e-10);
}

TEST_CASE("oracle agrees with the solver")
{
    for (double alpha : {0.3, 1.0, 2.5}) {
        const auto s = chain(2, alpha);
        const DissipationSpec d{0.0, 1.0};
        CHECK((oracle::oracle_ness(s, d).C - solve_ness(s, d).C).cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto s = chain(4, 0.8);
    const DissipationSpec d{2.0, 1.0};
    CHECK((oracle::oracle_ness(s, d).C - solve_ness(s, d).C).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("size limit and degenerate null space")
{
    CHECK_THROWS_AS(oracle::build_liouvillian(chain(7, 1.0), {0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(oracle::oracle_ness(chain(7, 1.0), {0.5, 1.0}), std::domain_error);
    // No drive: every number sector has its own steady state.
    CHECK_THROWS(oracle::oracle_ness(chain(2, 1.0), {0.5, 0.0}));
}

}
