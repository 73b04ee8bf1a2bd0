// eigensystem.cpp — Bi-orthogonal eigendecomposition of the effective Hamiltonian

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>
#include <stdexcept>
#include <string>

#include "nesslab/ness.hpp"

extern "C" void openblas_set_num_threads(int);

namespace nesslab {

namespace {

using cd = std::complex<double>;

void right_eigensystem(const Eigen::MatrixXcd& A, Eigen::VectorXcd& w, Eigen::MatrixXcd& vr)
{
    const lapack_int n = static_cast<lapack_int>(A.rows());
    Eigen::MatrixXcd work = A; // zgeev overwrites its input
    w.resize(n);
    vr.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'V', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(w.data()),
        nullptr, n,
        reinterpret_cast<lapack_complex_double*>(vr.data()), n);
    if (info != 0) {
        throw EigensystemError("eigendecompose: zgeev failed with info = " + std::to_string(info),
                               static_cast<double>(info));
    }
}

// Right singular vectors of the m smallest singular values, as columns.
Eigen::MatrixXcd trailing_right_singular_vectors(Eigen::MatrixXcd A, Eigen::Index m)
{
    const lapack_int n = static_cast<lapack_int>(A.rows());
    Eigen::VectorXd sv(n);
    Eigen::VectorXd superb(std::max<lapack_int>(1, n - 1));
    Eigen::MatrixXcd vt(n, n);
    const lapack_int info = LAPACKE_zgesvd(
        LAPACK_COL_MAJOR, 'N', 'A', n, n,
        reinterpret_cast<lapack_complex_double*>(A.data()), n, sv.data(),
        nullptr, n,
        reinterpret_cast<lapack_complex_double*>(vt.data()), n, superb.data());
    if (info != 0) {
        throw EigensystemError("eigendecompose: zgesvd failed with info = " + std::to_string(info),
                               static_cast<double>(info));
    }
    // Singular values come sorted in decreasing order.
    return vt.bottomRows(m).adjoint();
}

// Exactly degenerate eigenvalues (alpha = 0 gives an (L-2)-fold one) leave zgeev
// with nearly parallel vectors inside the cluster. Any basis of the eigenspace
// will do, so each cluster is replaced by an orthonormal one from an SVD.
void orthonormalise_clusters(const Eigen::MatrixXcd& A, Eigen::VectorXcd& w, Eigen::MatrixXcd& vr)
{
    const Eigen::Index n = w.size();
    const double tol = 1e-10 * std::max(A.norm(), 1e-300);

    std::vector<Eigen::Index> parent(n);
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto root = [&](Eigen::Index i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
            if (std::abs(w(p) - w(q)) <= tol) parent[root(q)] = root(p);
        }
    }
    std::vector<std::vector<Eigen::Index>> clusters(n);
    for (Eigen::Index p = 0; p < n; ++p) clusters[root(p)].push_back(p);

    for (const auto& members : clusters) {
        const auto m = static_cast<Eigen::Index>(members.size());
        if (m < 2) continue;
        cd centre(0.0, 0.0);
        for (auto p : members) centre += w(p);
        centre /= static_cast<double>(m);

        Eigen::MatrixXcd shifted = A;
        shifted.diagonal().array() -= centre;
        // Eigen's BDCSVD returned NaN vectors on these matrices; zgesvd does not.
        const Eigen::MatrixXcd basis = trailing_right_singular_vectors(shifted, m);
        for (Eigen::Index c = 0; c < m; ++c) {
            vr.col(members[c]) = basis.col(c);
            w(members[c]) = centre;
        }
    }
}

struct Checks {
    double condition;
    double biorthogonality;
    double reconstruction;
    Eigen::MatrixXcd left_adjoint;
};

Checks check_eigensystem(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& w, const Eigen::MatrixXcd& vr)
{
    const Eigen::Index n = A.rows();
    Checks c;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vr);
    const double rcond = lu.rcond();
    c.condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
    c.biorthogonality = INFINITY;
    c.reconstruction = INFINITY;
    if (!(c.condition <= 1e12)) return c;

    // Rows of PhiR^{-1} are the conjugated left eigenvectors.
    c.left_adjoint = lu.inverse();
    Eigen::MatrixXcd gram(n, n);
    gram.noalias() = c.left_adjoint * vr;
    gram.diagonal().array() -= cd(1.0, 0.0);
    c.biorthogonality = gram.cwiseAbs().maxCoeff();

    Eigen::MatrixXcd rebuilt(n, n);
    rebuilt.noalias() = (vr * w.asDiagonal()) * c.left_adjoint;
    c.reconstruction = (rebuilt - A).norm() / std::max(A.norm(), 1e-300);
    return c;
}

bool acceptable(const Checks& c)
{
    return c.condition <= 1e12 && c.biorthogonality <= 1e-10 && c.reconstruction <= 1e-9;
}

} // namespace

BiorthogonalEigensystem eigendecompose(const EffectiveHamiltonian& Heff)
{
    if (Heff.rows() != Heff.cols() || Heff.rows() == 0) {
        throw std::invalid_argument("eigendecompose: matrix must be square and non-empty");
    }
    if (!Heff.allFinite()) {
        throw std::invalid_argument("eigendecompose: matrix has non-finite entries");
    }
    BiorthogonalEigensystem eig;
    right_eigensystem(Heff, eig.lambda, eig.PhiR);
    Checks c = check_eigensystem(Heff, eig.lambda, eig.PhiR);
    if (!acceptable(c)) {
        orthonormalise_clusters(Heff, eig.lambda, eig.PhiR);
        c = check_eigensystem(Heff, eig.lambda, eig.PhiR);
    }

    eig.condition_estimate = c.condition;
    eig.biorthogonality_residual = c.biorthogonality;
    eig.reconstruction_residual = c.reconstruction;
    if (!(c.condition <= 1e12)) {
        throw EigensystemError("eigendecompose: eigenvector matrix is near-defective (condition "
                                   + std::to_string(c.condition) + ")",
                               c.condition);
    }
    if (!(c.biorthogonality <= 1e-10)) {
        throw EigensystemError("eigendecompose: bi-orthonormality residual too large",
                               c.biorthogonality);
    }
    if (!(c.reconstruction <= 1e-9)) {
        throw EigensystemError("eigendecompose: reconstruction residual too large",
                               c.reconstruction);
    }
    eig.PhiL = c.left_adjoint.adjoint();
    return eig;
}

void set_blas_threads(int n)
{
    if (n < 1) throw std::invalid_argument("set_blas_threads: need at least one thread");
    openblas_set_num_threads(n);
}

} // namespace nesslab
