#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fracsav/allen_cahn.hpp"
#include "fracsav/cq_weights.hpp"
#include "fracsav/legendre_space.hpp"

namespace fracsav {

/// Per-step record of the scalar auxiliary variable and energy quantities.
struct StepDiagnostics {
    std::size_t n = 0;
    double t = 0;
    double r = 0;
    double xi = 0;
    double eta = 0;
    double energy_bar = 0;    ///< E(u_bar^n)
    double K_bar = 0;         ///< discrete K(u_bar^n)
    double grad_norm_sq = 0;  ///< (grad u^n, grad u^n)
    double solve_residual = 0;
    double forcing_power = 0;  ///< W^n, zero unless the forcing is coupled into r
};

/// How a manufactured forcing enters the update of r.
enum class ForcingCoupling {
    /// r^n (1 + tau K/E) = r^{n-1}; the scheme as stated, used in both modes.
    none,
    /// r^n (1 + tau K/E) = r^{n-1} + tau W^n with W^n = (F(t_n), (u_bar^n - u_bar^{n-1})/tau).
    forcing_power,
};

struct StepperOptions {
    ForcingCoupling forcing_coupling = ForcingCoupling::none;
};

/// Time-stepping state after `step` steps.
struct SavState {
    static constexpr std::size_t kExtrapolationLevels = 6;

    std::size_t step = 0;
    double tau = 0;
    /// w^0..w^n with w^j = u^j - u^0, kept densely for the quadrature sum.
    std::vector<Field> w_history;
    /// u_bar^n, u_bar^{n-1}, ..., u_bar^{n-5}; most recent first.
    std::vector<Field> u_bar_history;
    Field u;
    double r = 0;
    double xi = 1;
    double eta = 1;
    CQWeights<double> weights;
    std::vector<StepDiagnostics> diagnostics;

    double t() const { return static_cast<double>(step) * tau; }
    const Field& u_bar() const { return u_bar_history.front(); }
};

/// Level-0 state: u^0 = u_bar^0 = projected initial data, r^0 = E(u^0),
/// u_bar^{-j} = u^0 for j = 1..5, weights precomputed for n_steps.
SavState init_state(const AllenCahnProblem& problem, double tau, std::size_t n_steps);

/// BDF6 SAV integrator for the time-fractional Allen-Cahn problem.
///
/// Each step solves (g_0 tau^-alpha M + S) w_bar = b for the unrelaxed
/// increment, updates r from the discrete dissipation K(u_bar^n), and relaxes
/// u^n = eta^n u_bar^n with eta^n = 1 - (1 - xi^n)^8. A step is strictly
/// sequential; independent steppers may run on separate threads.
class SavBdf6Stepper {
public:
    SavBdf6Stepper(AllenCahnProblem problem, double tau, std::size_t n_steps,
                   StepperOptions options = {});

    /// Advance one step. Throws RelaxationBreakdown when 1 + tau K/E <= 0 and
    /// ParameterError once the precomputed weights are exhausted.
    const StepDiagnostics& step();

    const SavState& state() const { return state_; }
    SavState release() && { return std::move(state_); }

    const AllenCahnProblem& problem() const { return problem_; }
    const ShiftedLaplacianSolver& solver() const { return solver_; }

    /// Load vector b of the linear system solved at level n, given the
    /// current history (used to verify the solve independently).
    VectorXd assemble_rhs(std::size_t n) const;

private:
    AllenCahnProblem problem_;
    StepperOptions options_;
    double tau_pow_;  ///< tau^-alpha
    ShiftedLaplacianSolver solver_;
    VectorXd u0_stiffness_;
    SavState state_;
};

struct ErrorReport {
    double linf = 0;  ///< max over quadrature nodes
    double l2 = 0;    ///< quadrature-weighted nodal norm
};

/// Error of u against the manufactured exact solution at time t.
ErrorReport solution_error(const AllenCahnProblem& problem, const Field& u, double t);

struct RunResult {
    SavState state;
    std::optional<ErrorReport> errors;
};

/// Number of steps t_final / tau; throws ParameterError unless integral to 1e-12.
std::size_t step_count(double tau, double t_final);

RunResult run(const AllenCahnProblem& problem, double tau, double t_final,
              StepperOptions options = {});

/// Energy-stability checks over a run.
struct StabilityVerdict {
    bool r_nonnegative = true;
    bool xi_nonnegative = true;
    bool r_monotone = true;  ///< over steps with K_bar >= 0
    double max_identity_error = 0;  ///< max |r^n - r^{n-1} + tau xi^n K^n| / r^{n-1}
    std::vector<std::size_t> negative_K_steps;
    bool pass = true;
};

inline constexpr double kEnergyIdentityTolerance = 1e-12;

StabilityVerdict assess_stability(const SavState& state, double r0,
                                  double identity_tolerance = kEnergyIdentityTolerance);

}  // namespace fracsav
