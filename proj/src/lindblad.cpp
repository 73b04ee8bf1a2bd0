// lindblad.cpp — Correlation-matrix equation of motion and RK4 propagation

#include "nesslab/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace nesslab {

namespace {

using cd = std::complex<double>;

Eigen::VectorXd damping_diagonal(Eigen::Index L, const DissipationSpec& diss)
{
    Eigen::VectorXd d = Eigen::VectorXd::Constant(L, 0.5 * diss.gamma);
    d(0) += 0.5 * diss.Gamma;
    d(L - 1) += 0.5 * diss.Gamma;
    return d;
}

double spectral_norm(const HoppingMatrix& H)
{
    if (H.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_input_state(const CorrelationMatrix& C, Eigen::Index L)
{
    if (C.rows() != L || C.cols() != L) {
        throw std::invalid_argument("evolve: initial correlation matrix has wrong shape");
    }
    const auto chk = inspect_correlation(C);
    if (chk.hermiticity > 1e-12) {
        throw std::invalid_argument("evolve: initial correlation matrix is not Hermitian");
    }
    if (chk.min_eigenvalue < -1e-9 || chk.max_eigenvalue > 1.0 + 1e-9) {
        throw std::invalid_argument("evolve: initial correlation spectrum outside [0, 1]");
    }
}

} // namespace

void DissipationSpec::validate_rates() const
{
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw std::invalid_argument("DissipationSpec: gamma must be finite and >= 0");
    }
    if (!std::isfinite(Gamma) || Gamma < 0.0) {
        throw std::invalid_argument("DissipationSpec: Gamma must be finite and >= 0");
    }
}

void DissipationSpec::validate() const
{
    validate_rates();
    if (!(Gamma > 0.0)) {
        throw std::invalid_argument("DissipationSpec: Gamma must be > 0 for a unique steady state");
    }
}

Eigen::VectorXd build_damping(const LatticeSpec& spec, const DissipationSpec& diss)
{
    spec.validate();
    diss.validate_rates();
    return damping_diagonal(spec.L, diss);
}

Eigen::VectorXd build_pump(const Eigen::VectorXd& diagC, const DissipationSpec& diss)
{
    diss.validate_rates();
    if (diagC.size() == 0) {
        throw std::invalid_argument("build_pump: empty diagonal");
    }
    Eigen::VectorXd p = diss.gamma * diagC;
    p(p.size() - 1) += diss.Gamma;
    return p;
}

EffectiveHamiltonian build_effective_hamiltonian(const HoppingMatrix& H,
                                                 const DissipationSpec& diss)
{
    diss.validate();
    if (H.rows() != H.cols() || H.rows() == 0) {
        throw std::invalid_argument("build_effective_hamiltonian: H must be square and non-empty");
    }
    EffectiveHamiltonian Heff = H.cast<cd>();
    const Eigen::VectorXd d = damping_diagonal(H.rows(), diss);
    Heff.diagonal() -= cd(0.0, 1.0) * d.cast<cd>();
    return Heff;
}

Eigen::MatrixXcd eom_rhs(const CorrelationMatrix& C,
                         const HoppingMatrix& H,
                         const Eigen::VectorXd& damping,
                         const DissipationSpec& diss)
{
    const Eigen::Index n = H.rows();
    if (C.rows() != n || C.cols() != n || damping.size() != n) {
        throw std::invalid_argument("eom_rhs: dimension mismatch");
    }
    // H is real, so split C into real and imaginary parts and use real products.
    const Eigen::MatrixXd Cr = C.real();
    const Eigen::MatrixXd Ci = C.imag();
    Eigen::MatrixXd comm_r(n, n), comm_i(n, n);
    comm_r.noalias() = H * Cr;
    comm_r.noalias() -= Cr * H;
    comm_i.noalias() = H * Ci;
    comm_i.noalias() -= Ci * H;

    // -i (A + iB) = B - iA
    Eigen::MatrixXcd out(n, n);
    out.real() = comm_i;
    out.imag() = -comm_r;
    out -= damping.asDiagonal() * C;
    out -= C * damping.asDiagonal();
    out.diagonal() += build_pump(C.diagonal().real(), diss).cast<cd>();
    return out;
}

CorrelationCheck inspect_correlation(const CorrelationMatrix& C)
{
    CorrelationCheck chk;
    const double scale = std::max(C.norm(), 1.0);
    chk.hermiticity = (C - C.adjoint()).norm() / scale;
    const Eigen::MatrixXcd herm = 0.5 * (C + C.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    chk.min_eigenvalue = es.eigenvalues().minCoeff();
    chk.max_eigenvalue = es.eigenvalues().maxCoeff();
    return chk;
}

Trajectory evolve(const CorrelationMatrix& C0,
                  const HoppingMatrix& H,
                  const Eigen::VectorXd& damping,
                  const DissipationSpec& diss,
                  const EvolveControls& controls)
{
    diss.validate_rates();
    check_input_state(C0, H.rows());
    if (!std::isfinite(controls.t_final) || controls.t_final < 0.0) {
        throw std::invalid_argument("evolve: t_final must be finite and >= 0");
    }

    Trajectory traj;
    traj.final_state = C0;
    traj.times.push_back(0.0);
    traj.samples.push_back(C0);
    if (controls.t_final == 0.0) {
        traj.final_rhs_norm = eom_rhs(C0, H, damping, diss).norm();
        return traj;
    }

    double h = controls.step;
    if (h <= 0.0) {
        const double rate = spectral_norm(H) + damping.maxCoeff();
        h = rate > 0.0 ? controls.step_safety / rate : controls.t_final;
    }
    h = std::min(h, controls.t_final);
    if (!(h > 1e-14 * controls.t_final)) {
        throw IntegrationError("evolve: step size underflow", 0.0, 0);
    }
    const long n_steps = static_cast<long>(std::ceil(controls.t_final / h - 1e-12));
    h = controls.t_final / static_cast<double>(n_steps);
    traj.step = h;

    const long sample_every = controls.sample_interval > 0.0
        ? std::max<long>(1, std::lround(controls.sample_interval / h))
        : n_steps;

    CorrelationMatrix C = C0;
    Eigen::MatrixXcd k1, k2, k3, k4, tmp;
    double t = 0.0;
    for (long s = 1; s <= n_steps; ++s) {
        k1 = eom_rhs(C, H, damping, diss);
        if (controls.stop_tolerance > 0.0 && k1.norm() <= controls.stop_tolerance) {
            traj.stopped_early = true;
            traj.final_rhs_norm = k1.norm();
            traj.steps = s - 1;
            break;
        }
        tmp = C + 0.5 * h * k1;
        k2 = eom_rhs(tmp, H, damping, diss);
        tmp = C + 0.5 * h * k2;
        k3 = eom_rhs(tmp, H, damping, diss);
        tmp = C + h * k3;
        k4 = eom_rhs(tmp, H, damping, diss);
        C += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tmp = 0.5 * (C + C.adjoint());
        C = tmp;
        t = static_cast<double>(s) * h;
        traj.steps = s;

        if (!C.allFinite()) {
            throw IntegrationError("evolve: non-finite correlation matrix", t, s);
        }
        if (s % sample_every == 0 || s == n_steps) {
            traj.times.push_back(t);
            traj.samples.push_back(C);
        }
    }
    if (traj.stopped_early && traj.times.back() != t) {
        traj.times.push_back(t);
        traj.samples.push_back(C);
    }
    traj.final_time = t;
    traj.final_state = C;
    if (!traj.stopped_early) {
        traj.final_rhs_norm = eom_rhs(C, H, damping, diss).norm();
    }
    return traj;
}

Trajectory evolve(const CorrelationMatrix& C0,
                  const LatticeSpec& spec,
                  const DissipationSpec& diss,
                  const EvolveControls& controls)
{
    return evolve(C0, build_hamiltonian(spec), build_damping(spec, diss), diss, controls);
}

} // namespace nesslab
