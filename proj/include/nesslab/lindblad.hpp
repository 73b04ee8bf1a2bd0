// lindblad.hpp — Correlation-matrix equation of motion for the dephased,
// boundary-driven chain
//
// Convention: C(n, m) = <c_n c_m^dagger> (hole correlations), so the site
// density is 1 - C(m, m). The jump operators are sqrt(gamma) n_j on every
// site, sqrt(Gamma) c_1^dagger (injection) and sqrt(Gamma) c_L (extraction).
// Under these rates
//
//     dC/dt = -i [H, C] - {D, C} + P(diag C),
//     D = diag(gamma/2 + Gamma/2 [m = 1] + Gamma/2 [m = L]),
//     P = diag(gamma C(m, m) + Gamma [m = L]).

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nesslab/lattice.hpp"

namespace nesslab {

using CorrelationMatrix = Eigen::MatrixXcd;
using EffectiveHamiltonian = Eigen::MatrixXcd;

struct DissipationSpec {
    double gamma{0.0}; // dephasing rate
    double Gamma{1.0}; // injection / extraction rate

    // Strict check used by the steady-state paths: gamma >= 0, Gamma > 0.
    void validate() const;
    // Relaxed check for harnesses that switch the drive off: both rates >= 0.
    void validate_rates() const;
};

// Diagonal of D.
Eigen::VectorXd build_damping(const LatticeSpec& spec, const DissipationSpec& diss);

// Diagonal of P for the given diagonal of C.
Eigen::VectorXd build_pump(const Eigen::VectorXd& diagC, const DissipationSpec& diss);

// H - i D. Rejects Gamma = 0 (the steady state would not be unique).
EffectiveHamiltonian build_effective_hamiltonian(const HoppingMatrix& H,
                                                 const DissipationSpec& diss);

// Right-hand side of the equation of motion. `damping` is the diagonal of D.
Eigen::MatrixXcd eom_rhs(const CorrelationMatrix& C,
                         const HoppingMatrix& H,
                         const Eigen::VectorXd& damping,
                         const DissipationSpec& diss);

struct CorrelationCheck {
    double hermiticity{0.0};   // ||C - C^dagger||_F / max(||C||_F, 1)
    double min_eigenvalue{0.0};
    double max_eigenvalue{0.0};
};

CorrelationCheck inspect_correlation(const CorrelationMatrix& C);

struct EvolveControls {
    double t_final{0.0};
    // 0 picks the largest step with step * (||H||_2 + max D) <= step_safety.
    double step{0.0};
    double step_safety{0.1};
    // Record a sample every `sample_interval` time units (0: endpoints only).
    double sample_interval{0.0};
    // Stop once ||dC/dt||_F drops below this value (0 disables).
    double stop_tolerance{0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<CorrelationMatrix> samples;
    CorrelationMatrix final_state;
    double final_time{0.0};
    long steps{0};
    double step{0.0};
    double final_rhs_norm{0.0};
    bool stopped_early{false};
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time, long step_index)
        : std::runtime_error(what), time_(time), step_index_(step_index) {}
    double time() const { return time_; }
    long step_index() const { return step_index_; }

private:
    double time_;
    long step_index_;
};

// Classical fourth-order Runge-Kutta with a fixed step. C is re-Hermitised
// after every step.
Trajectory evolve(const CorrelationMatrix& C0,
                  const HoppingMatrix& H,
                  const Eigen::VectorXd& damping,
                  const DissipationSpec& diss,
                  const EvolveControls& controls);

Trajectory evolve(const CorrelationMatrix& C0,
                  const LatticeSpec& spec,
                  const DissipationSpec& diss,
                  const EvolveControls& controls);

} // namespace nesslab
