// ness.cpp — Steady-state correlation matrix, self-consistency solvers and currents

#include "nesslab/ness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>

namespace nesslab {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

double kernel_scale(const BiorthogonalEigensystem& eig)
{
    return std::max(eig.lambda.cwiseAbs().maxCoeff(), 1e-300);
}

void check_index(int idx, Eigen::Index n, const char* name)
{
    if (idx < 1 || idx > n) {
        throw std::domain_error(std::string("theta: index ") + name + " out of range");
    }
}

// Diagonal pump -> bi-orthogonal basis -> divide by the kernel.
Eigen::MatrixXcd transformed_solution(const BiorthogonalEigensystem& eig,
                                      const Eigen::MatrixXcd& K,
                                      const Eigen::VectorXd& pump)
{
    const Eigen::Index n = eig.size();
    Eigen::MatrixXcd scaled = eig.PhiL.adjoint() * pump.cast<cd>().asDiagonal();
    Eigen::MatrixXcd Ct(n, n);
    Ct.noalias() = scaled * eig.PhiL;
    return Ct.cwiseProduct(K);
}

// Affine self-consistency operator x -> x - gamma diag(S(diag x)).
struct SelfConsistencyOperator {
    const BiorthogonalEigensystem& eig;
    Eigen::MatrixXcd K;
    double gamma;
    int applications{0};

    Eigen::VectorXd apply(const Eigen::VectorXd& x)
    {
        ++applications;
        const Eigen::Index n = eig.size();
        const Eigen::MatrixXcd Ct = transformed_solution(eig, K, x);
        Eigen::MatrixXcd RC(n, n);
        RC.noalias() = eig.PhiR * Ct;
        const Eigen::VectorXd diag =
            RC.cwiseProduct(eig.PhiR.conjugate()).rowwise().sum().real();
        return x - gamma * diag;
    }
};

double relative_residual(const Eigen::VectorXd& r, const Eigen::VectorXd& x)
{
    return r.norm() / std::max(x.norm(), std::numeric_limits<double>::min());
}

// Currents are small next to ||x|| at large gamma, so Krylov runs aim below the
// requested tolerance; anything under the tolerance itself is still accepted.
double polish_target(double tol)
{
    return std::max(1e-2 * tol, 1e-15);
}

struct LinearSolveOutcome {
    Eigen::VectorXd x;
    bool converged{false};
    double residual{INFINITY};
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
LinearSolveOutcome gmres(SelfConsistencyOperator& op,
                         const Eigen::VectorXd& rhs,
                         const Eigen::VectorXd& x0,
                         int restart,
                         int max_iterations,
                         double tol,
                         std::vector<double>& history)
{
    const Eigen::Index n = rhs.size();
    const int m = std::max(1, std::min<int>(restart, static_cast<int>(n)));
    LinearSolveOutcome out;
    out.x = x0;
    Eigen::VectorXd r = rhs - op.apply(out.x);
    out.residual = relative_residual(r, out.x);
    history.push_back(out.residual);
    int used = 0;

    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1);

    while (out.residual > tol && used < max_iterations) {
        const double beta = r.norm();
        V.col(0) = r / beta;
        g.setZero();
        g(0) = beta;
        Hs.setZero();
        int k = 0;
        const double xnorm = std::max(out.x.norm(), std::numeric_limits<double>::min());
        for (; k < m && used < max_iterations; ++k) {
            Eigen::VectorXd w = op.apply(V.col(k));
            ++used;
            for (int i = 0; i <= k; ++i) {
                Hs(i, k) = w.dot(V.col(i));
                w -= Hs(i, k) * V.col(i);
            }
            Hs(k + 1, k) = w.norm();
            const bool breakdown = Hs(k + 1, k) <= 1e-14 * beta;
            if (!breakdown) V.col(k + 1) = w / Hs(k + 1, k);

            for (int i = 0; i < k; ++i) {
                const double t = cs(i) * Hs(i, k) + sn(i) * Hs(i + 1, k);
                Hs(i + 1, k) = -sn(i) * Hs(i, k) + cs(i) * Hs(i + 1, k);
                Hs(i, k) = t;
            }
            const double denom = std::hypot(Hs(k, k), Hs(k + 1, k));
            cs(k) = Hs(k, k) / denom;
            sn(k) = Hs(k + 1, k) / denom;
            Hs(k, k) = denom;
            Hs(k + 1, k) = 0.0;
            g(k + 1) = -sn(k) * g(k);
            g(k) = cs(k) * g(k);

            history.push_back(std::abs(g(k + 1)) / xnorm);
            if (std::abs(g(k + 1)) <= 0.5 * tol * xnorm || breakdown) {
                ++k;
                break;
            }
        }
        const Eigen::VectorXd y =
            Hs.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        out.x += V.leftCols(k) * y;
        r = rhs - op.apply(out.x);
        out.residual = relative_residual(r, out.x);
        history.push_back(out.residual);
    }
    out.converged = out.residual <= tol;
    return out;
}

LinearSolveOutcome damped_fixed_point(SelfConsistencyOperator& op,
                                      const Eigen::VectorXd& rhs,
                                      const Eigen::VectorXd& x0,
                                      double omega,
                                      int max_iterations,
                                      double tol,
                                      std::vector<double>& history)
{
    LinearSolveOutcome out;
    out.x = x0;
    for (int it = 0; it < max_iterations; ++it) {
        // op(x) = x - gamma M x, so the residual r = rhs - op(x) is the fixed-point update.
        const Eigen::VectorXd r = rhs - op.apply(out.x);
        out.residual = relative_residual(r, out.x);
        history.push_back(out.residual);
        if (out.residual <= tol) break;
        out.x += omega * r;
    }
    out.converged = out.residual <= tol;
    return out;
}

LinearSolveOutcome explicit_solve(SelfConsistencyOperator& op,
                                  const BiorthogonalEigensystem& eig,
                                  const Eigen::VectorXd& rhs,
                                  double gamma,
                                  std::vector<double>& history)
{
    Eigen::MatrixXd A = -gamma * self_consistency_matrix(eig);
    A.diagonal().array() += 1.0;
    LinearSolveOutcome out;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
        out.x = llt.solve(rhs);
    } else {
        out.x = A.partialPivLu().solve(rhs);
    }
    out.residual = relative_residual(rhs - A * out.x, out.x);
    // One operator application as an independent check on the explicit matrix.
    const double check = relative_residual(rhs - op.apply(out.x), out.x);
    history.push_back(check);
    out.residual = std::max(out.residual, check);
    return out;
}

} // namespace

Eigen::MatrixXcd steady_state_kernel(const Eigen::VectorXcd& lambda, double scale)
{
    const Eigen::Index n = lambda.size();
    Eigen::MatrixXcd K(n, n);
    const double guard = 1e-12 * scale;
    for (Eigen::Index q = 0; q < n; ++q) {
        const cd lq = std::conj(lambda(q));
        for (Eigen::Index p = 0; p < n; ++p) {
            const cd d = lambda(p) - lq;
            if (std::abs(d) < guard) {
                throw std::domain_error("steady_state_kernel: degenerate denominator "
                                        "(spectrum touches the real axis; no unique steady state)");
            }
            K(p, q) = 1.0 / (kI * d);
        }
    }
    return K;
}

std::complex<double> theta(const BiorthogonalEigensystem& eig, int i, int j, int k)
{
    const Eigen::Index n = eig.size();
    if (n > kThetaMaxSites) {
        throw std::domain_error("theta: element-wise access is limited to L <= 128");
    }
    check_index(i, n, "i");
    check_index(j, n, "j");
    check_index(k, n, "k");
    const Eigen::MatrixXcd K = steady_state_kernel(eig.lambda, kernel_scale(eig));
    // u(p) = PhiR(i,p) conj(PhiL(k,p)),  v(q) = conj(PhiR(j,q)) PhiL(k,q)
    const Eigen::VectorXcd u =
        eig.PhiR.row(i - 1).transpose().cwiseProduct(eig.PhiL.row(k - 1).transpose().conjugate());
    const Eigen::VectorXcd v =
        eig.PhiR.row(j - 1).transpose().conjugate().cwiseProduct(eig.PhiL.row(k - 1).transpose());
    return (u.transpose() * K * v)(0, 0);
}

CorrelationMatrix sylvester_apply(const BiorthogonalEigensystem& eig,
                                  const Eigen::VectorXd& pump)
{
    const Eigen::Index n = eig.size();
    if (pump.size() != n) {
        throw std::invalid_argument("sylvester_apply: pump length mismatch");
    }
    const Eigen::MatrixXcd K = steady_state_kernel(eig.lambda, kernel_scale(eig));
    const Eigen::MatrixXcd Ct = transformed_solution(eig, K, pump);
    Eigen::MatrixXcd RC(n, n);
    RC.noalias() = eig.PhiR * Ct;
    CorrelationMatrix C(n, n);
    C.noalias() = RC * eig.PhiR.adjoint();
    return 0.5 * (C + C.adjoint());
}

Eigen::VectorXd sylvester_apply_diagonal(const BiorthogonalEigensystem& eig,
                                         const Eigen::VectorXd& pump)
{
    if (pump.size() != eig.size()) {
        throw std::invalid_argument("sylvester_apply_diagonal: pump length mismatch");
    }
    SelfConsistencyOperator op{eig, steady_state_kernel(eig.lambda, kernel_scale(eig)), 1.0};
    return pump - op.apply(pump);
}

Eigen::MatrixXd self_consistency_matrix(const BiorthogonalEigensystem& eig)
{
    const Eigen::Index n = eig.size();
    const Eigen::MatrixXcd K = steady_state_kernel(eig.lambda, kernel_scale(eig));
    const Eigen::MatrixXcd Kt = K.transpose();
    const Eigen::MatrixXcd Rt = eig.PhiR.transpose();    // column i = row i of PhiR
    const Eigen::MatrixXcd Linv = eig.PhiL.adjoint();    // column k: conj(PhiL(k, .))

    Eigen::MatrixXd M(n, n);
    // Columns of W hold w_(i,k)(p) = PhiR(i,p) conj(PhiL(k,p)) for k >= i, so
    // M(i,k) = w^T K conj(w). Chunked to bound the working set.
    const Eigen::Index target = std::max<Eigen::Index>(1, (Eigen::Index{1} << 21) / n);
    Eigen::Index i0 = 0;
    while (i0 < n) {
        Eigen::Index cols = 0;
        Eigen::Index i1 = i0;
        while (i1 < n && (cols == 0 || cols + (n - i1) <= target)) {
            cols += n - i1;
            ++i1;
        }
        Eigen::MatrixXcd W(n, cols);
        Eigen::Index c = 0;
        for (Eigen::Index i = i0; i < i1; ++i) {
            for (Eigen::Index k = i; k < n; ++k, ++c) {
                W.col(c) = Rt.col(i).cwiseProduct(Linv.col(k));
            }
        }
        Eigen::MatrixXcd Y(n, cols);
        Y.noalias() = Kt * W;
        const Eigen::RowVectorXd vals = Y.cwiseProduct(W.conjugate()).colwise().sum().real();
        c = 0;
        for (Eigen::Index i = i0; i < i1; ++i) {
            for (Eigen::Index k = i; k < n; ++k, ++c) {
                M(i, k) = vals(c);
                M(k, i) = vals(c);
            }
        }
        i0 = i1;
    }
    return M;
}

std::string to_string(SolveStrategy s)
{
    switch (s) {
    case SolveStrategy::Auto: return "auto";
    case SolveStrategy::Krylov: return "krylov";
    case SolveStrategy::Explicit: return "explicit";
    case SolveStrategy::FixedPoint: return "fixed-point";
    }
    return "unknown";
}

SolveStrategy parse_solve_strategy(const std::string& name)
{
    if (name == "auto") return SolveStrategy::Auto;
    if (name == "krylov") return SolveStrategy::Krylov;
    if (name == "explicit") return SolveStrategy::Explicit;
    if (name == "fixed-point") return SolveStrategy::FixedPoint;
    throw std::invalid_argument("unknown solve strategy '" + name + "'");
}

NessResult solve_ness(const LatticeSpec& spec,
                      const DissipationSpec& diss,
                      const SolverControls& controls)
{
    spec.validate();
    diss.validate();
    if (!(controls.tolerance > 0.0) || controls.max_iterations < 1 || controls.restart < 1) {
        throw std::invalid_argument("solve_ness: invalid solver controls");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = spec.L;

    const HoppingMatrix H = build_hamiltonian(spec);
    const EffectiveHamiltonian Heff = build_effective_hamiltonian(H, diss);
    const BiorthogonalEigensystem eig = eigendecompose(Heff);

    SolverDiagnostics diag;
    SelfConsistencyOperator op{eig, Eigen::MatrixXcd(), diss.gamma};
    try {
        op.K = steady_state_kernel(eig.lambda, std::max(Heff.norm(), 1e-300));
    } catch (const std::domain_error& e) {
        throw SolverError(std::string("solve_ness: ") + e.what(), {});
    }

    // b = diag(S(e_L)); the gamma = 0 solution is Gamma b.
    Eigen::VectorXd eL = Eigen::VectorXd::Zero(n);
    eL(n - 1) = 1.0;
    SelfConsistencyOperator unit{eig, op.K, 1.0};
    const Eigen::VectorXd b = eL - unit.apply(eL);
    const Eigen::VectorXd rhs = diss.Gamma * b;

    Eigen::VectorXd x = rhs;
    if (diss.gamma == 0.0) {
        diag.path = controls.strategy;
        diag.residual = 0.0;
    } else {
        LinearSolveOutcome res;
        switch (controls.strategy) {
        case SolveStrategy::Explicit:
            res = explicit_solve(op, eig, rhs, diss.gamma, diag.residual_history);
            diag.path = SolveStrategy::Explicit;
            break;
        case SolveStrategy::FixedPoint:
            res = damped_fixed_point(op, rhs, x, controls.relaxation, controls.max_iterations,
                                     controls.tolerance, diag.residual_history);
            diag.path = SolveStrategy::FixedPoint;
            break;
        case SolveStrategy::Krylov:
            res = gmres(op, rhs, x, controls.restart, controls.max_iterations,
                        polish_target(controls.tolerance), diag.residual_history);
            diag.path = SolveStrategy::Krylov;
            if (!(res.residual <= controls.tolerance)) {
                res = damped_fixed_point(op, rhs, res.x, controls.relaxation,
                                         controls.max_iterations, controls.tolerance,
                                         diag.residual_history);
                diag.path = SolveStrategy::FixedPoint;
            }
            break;
        case SolveStrategy::Auto: {
            // One explicit build costs about L/4 operator applications.
            const int budget = std::min(controls.max_iterations,
                                        std::max(controls.restart, static_cast<int>(n / 8)));
            const double target = polish_target(controls.tolerance);
            res = gmres(op, rhs, x, controls.restart, budget, target, diag.residual_history);
            if (res.residual <= controls.tolerance && res.residual > target) {
                auto polished = gmres(op, rhs, res.x, controls.restart, controls.restart, target,
                                      diag.residual_history);
                if (polished.residual < res.residual) res = std::move(polished);
            }
            diag.path = SolveStrategy::Krylov;
            if (!(res.residual <= controls.tolerance)) {
                res = explicit_solve(op, eig, rhs, diss.gamma, diag.residual_history);
                diag.path = SolveStrategy::Explicit;
            }
            break;
        }
        }
        if (!(res.residual <= controls.tolerance)) {
            throw SolverError("solve_ness: self-consistency did not converge (residual "
                                  + std::to_string(res.residual) + ")",
                              diag.residual_history);
        }
        x = res.x;
        diag.residual = res.residual;
    }
    diag.iterations = op.applications;

    NessResult out;
    Eigen::VectorXd pump = build_pump(x, diss);
    out.C = sylvester_apply(eig, pump);
    out.density = density_profile(out.C);

    out.site_in_current.resize(n);
    out.site_in_current(0) = lead_in_current(out.C, diss);
    for (int m = 2; m <= spec.L; ++m) {
        out.site_in_current(m - 1) = site_in_current(out.C, spec, m);
    }
    out.cut_current = cut_currents(out.C, spec);
    out.J_ness = lead_out_current(out.C, diss);
    out.R_ness = 1.0 / out.J_ness;

    diag.ness_residual = eom_rhs(out.C, H, build_damping(spec, diss), diss).norm();
    diag.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.diagnostics = std::move(diag);
    return out;
}

Eigen::VectorXd density_profile(const CorrelationMatrix& C)
{
    if (C.rows() != C.cols() || C.rows() == 0) {
        throw std::invalid_argument("density_profile: C must be square and non-empty");
    }
    const Eigen::Index n = C.rows();
    Eigen::VectorXd dens(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        if (std::abs(C(m, m).imag()) > 1e-10) {
            throw std::domain_error("density_profile: diagonal of C is not real");
        }
        dens(m) = 1.0 - C(m, m).real();
        if (dens(m) < -1e-9 || dens(m) > 1.0 + 1e-9) {
            throw std::domain_error("density_profile: non-physical density at site "
                                    + std::to_string(m + 1));
        }
    }
    return dens;
}

double site_in_current(const CorrelationMatrix& C, const LatticeSpec& spec, int m)
{
    spec.validate();
    if (C.rows() != spec.L || C.cols() != spec.L) {
        throw std::invalid_argument("site_in_current: C does not match the lattice");
    }
    if (m < 2 || m > spec.L) {
        throw std::domain_error("site_in_current: site must satisfy 2 <= m <= L; "
                                "use lead_in_current for site 1");
    }
    double total = 0.0;
    for (int r = 1; r <= m - 1; ++r) {
        total += 2.0 * hopping_amplitude(r, spec) * C(m - 1, m - 1 - r).imag();
    }
    return total;
}

double lead_in_current(const CorrelationMatrix& C, const DissipationSpec& diss)
{
    return diss.Gamma * C(0, 0).real();
}

double lead_out_current(const CorrelationMatrix& C, const DissipationSpec& diss)
{
    const Eigen::Index n = C.rows();
    return diss.Gamma * (1.0 - C(n - 1, n - 1).real());
}

double cut_current(const CorrelationMatrix& C, const LatticeSpec& spec, int m)
{
    spec.validate();
    if (C.rows() != spec.L || C.cols() != spec.L) {
        throw std::invalid_argument("cut_current: C does not match the lattice");
    }
    if (m < 1 || m > spec.L - 1) {
        throw std::domain_error("cut_current: bond index must satisfy 1 <= m <= L-1");
    }
    const HoppingMatrix H = build_hamiltonian(spec);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = m; j < spec.L; ++j) {
            total += 2.0 * H(j, i) * C(j, i).imag();
        }
    }
    return total;
}

Eigen::VectorXd cut_currents(const CorrelationMatrix& C, const LatticeSpec& spec)
{
    spec.validate();
    if (C.rows() != spec.L || C.cols() != spec.L) {
        throw std::invalid_argument("cut_currents: C does not match the lattice");
    }
    const Eigen::Index n = spec.L;
    if (n < 2) return Eigen::VectorXd();
    const HoppingMatrix H = build_hamiltonian(spec);
    // flow(j, i) for j > i: current from site i into site j.
    const Eigen::MatrixXd flow = 2.0 * H.cwiseProduct(C.imag());
    Eigen::VectorXd cuts(n - 1);
    // Cut after site 1: everything leaving site 1 to the right.
    double current = flow.col(0).tail(n - 1).sum();
    cuts(0) = current;
    for (Eigen::Index m = 1; m < n - 1; ++m) {
        // Move site m from the right block to the left block.
        current -= flow.row(m).head(m).sum();
        current += flow.col(m).tail(n - 1 - m).sum();
        cuts(m) = current;
    }
    return cuts;
}

} // namespace nesslab
