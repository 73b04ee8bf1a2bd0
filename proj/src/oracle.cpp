// oracle.cpp — Many-body Liouvillian and its steady state

#include "nesslab/oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace nesslab::oracle {

namespace {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

void check_size(int L)
{
    if (L < 1 || L > kMaxSites) {
        throw std::domain_error("oracle: L = " + std::to_string(L) + " outside [1, "
                                + std::to_string(kMaxSites) + "]");
    }
}

Matrix kron_chain(const std::vector<Matrix>& factors)
{
    Matrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        Matrix next = Eigen::kroneckerProduct(out, factors[i]).eval();
        out.swap(next);
    }
    return out;
}

} // namespace

FockOperatorSet build_fock_operators(int L)
{
    check_size(L);
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    Matrix Z = Matrix::Identity(2, 2);
    Z(1, 1) = -1.0;
    const Matrix I2 = Matrix::Identity(2, 2);

    FockOperatorSet ops;
    ops.L = L;
    for (int j = 0; j < L; ++j) {
        std::vector<Matrix> factors;
        for (int s = 0; s < L; ++s) {
            factors.push_back(s < j ? Z : (s == j ? a : I2));
        }
        ops.c.push_back(kron_chain(factors));
        ops.cdag.push_back(ops.c.back().adjoint());
        ops.n.push_back(ops.cdag.back() * ops.c.back());
    }
    return ops;
}

Matrix many_body_hamiltonian(const FockOperatorSet& ops, const HoppingMatrix& H)
{
    const Eigen::Index dim = ops.c.front().rows();
    Matrix Hmb = Matrix::Zero(dim, dim);
    for (int i = 0; i < ops.L; ++i) {
        for (int j = 0; j < ops.L; ++j) {
            if (H(i, j) != 0.0) Hmb += H(i, j) * (ops.cdag[i] * ops.c[j]);
        }
    }
    return Hmb;
}

std::vector<Matrix> jump_operators(const FockOperatorSet& ops, const DissipationSpec& diss)
{
    std::vector<Matrix> jumps;
    if (diss.gamma > 0.0) {
        for (int j = 0; j < ops.L; ++j) jumps.push_back(std::sqrt(diss.gamma) * ops.n[j]);
    }
    if (diss.Gamma > 0.0) {
        jumps.push_back(std::sqrt(diss.Gamma) * ops.cdag.front());
        jumps.push_back(std::sqrt(diss.Gamma) * ops.c.back());
    }
    return jumps;
}

Matrix build_liouvillian(const Matrix& H_mb, const std::vector<Matrix>& jumps)
{
    const Eigen::Index dim = H_mb.rows();
    const Matrix I = Matrix::Identity(dim, dim);
    Matrix loss = Matrix::Zero(dim, dim);
    for (const auto& Lm : jumps) loss += Lm.adjoint() * Lm;

    // I (x) G + conj(G) (x) I with G = -iH - loss/2 collects the commutator
    // and both anticommutator terms (H and loss are Hermitian).
    const Matrix G = cd(0.0, -1.0) * H_mb - 0.5 * loss;
    Matrix Lv = Eigen::kroneckerProduct(I, G).eval();
    Lv += Eigen::kroneckerProduct(G.conjugate(), I).eval();
    for (const auto& Lm : jumps) {
        Lv += Eigen::kroneckerProduct(Lm.conjugate(), Lm).eval();
    }
    return Lv;
}

Matrix build_liouvillian(const LatticeSpec& spec, const DissipationSpec& diss)
{
    spec.validate();
    diss.validate_rates();
    check_size(spec.L);
    const FockOperatorSet ops = build_fock_operators(spec.L);
    return build_liouvillian(many_body_hamiltonian(ops, build_hamiltonian(spec)),
                             jump_operators(ops, diss));
}

Matrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim)
{
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Eigen::VectorXcd vectorize(const Matrix& rho)
{
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

CorrelationMatrix correlation_from_density_matrix(const FockOperatorSet& ops, const Matrix& rho)
{
    CorrelationMatrix C(ops.L, ops.L);
    for (int n = 0; n < ops.L; ++n) {
        for (int m = 0; m < ops.L; ++m) {
            C(n, m) = expectation(rho, ops.c[n] * ops.cdag[m]);
        }
    }
    return C;
}

std::complex<double> expectation(const Matrix& rho, const Matrix& op)
{
    // Tr[rho op] = sum_ij rho(i,j) op(j,i)
    return rho.cwiseProduct(op.transpose()).sum();
}

OracleSteadyState oracle_ness(const LatticeSpec& spec, const DissipationSpec& diss)
{
    spec.validate();
    diss.validate_rates();
    check_size(spec.L);
    const FockOperatorSet ops = build_fock_operators(spec.L);
    const Matrix Lv = build_liouvillian(many_body_hamiltonian(ops, build_hamiltonian(spec)),
                                        jump_operators(ops, diss));
    const Eigen::Index dim = ops.c.front().rows();
    const Eigen::Index N = Lv.rows();

    // vec(I)^T L = 0, so the row for rho(0,0) is redundant; replace it by the
    // trace functional. The bordered matrix is regular iff the kernel is 1-D.
    // The LU condition estimate misses exact singularities with structural
    // zeros, so tiny pivots are checked as well.
    Matrix A = Lv;
    A.row(0) = vectorize(Matrix::Identity(dim, dim)).transpose();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
    rhs(0) = 1.0;
    Eigen::PartialPivLU<Matrix> lu(A);
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(lu.rcond() > 1e-13) || !(pivots.minCoeff() > 1e-12 * pivots.maxCoeff())) {
        throw std::runtime_error("oracle_ness: Liouvillian null space is not one-dimensional");
    }
    Matrix rho = unvectorize(lu.solve(rhs), dim);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();

    OracleSteadyState out;
    out.rho = rho;
    out.residual = (Lv * vectorize(rho)).norm();
    if (!(out.residual <= 1e-8)) {
        throw std::runtime_error("oracle_ness: steady-state residual "
                                 + std::to_string(out.residual) + " too large");
    }
    out.C = correlation_from_density_matrix(ops, rho);
    return out;
}

} // namespace nesslab::oracle
