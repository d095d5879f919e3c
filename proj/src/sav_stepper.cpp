#include "fracsav/sav_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace fracsav {

namespace {

double checked_tau(double tau) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    return tau;
}

}  // namespace

SavState init_state(const AllenCahnProblem& problem, double tau, std::size_t n_steps) {
    std::vector<Field> w_history;
    w_history.reserve(n_steps + 1);
    w_history.push_back(Field::zero(problem.space()));
    return SavState{
        .step = 0,
        .tau = checked_tau(tau),
        .w_history = std::move(w_history),
        .u_bar_history = std::vector<Field>(SavState::kExtrapolationLevels, problem.u0()),
        .u = problem.u0(),
        .r = problem.energy(problem.u0()),
        .xi = 1.0,
        .eta = 1.0,
        .weights = frac_weights(problem.alpha(), n_steps),
        .diagnostics = {},
    };
}

SavBdf6Stepper::SavBdf6Stepper(AllenCahnProblem problem, double tau, std::size_t n_steps,
                               StepperOptions options)
    : problem_(std::move(problem)),
      options_(options),
      tau_pow_(std::pow(checked_tau(tau), -problem_.alpha())),
      solver_(problem_.space(), std::pow(bdf6_symbol().coeffs[0].value(), problem_.alpha()) * tau_pow_),
      u0_stiffness_(problem_.space()->apply_stiffness(problem_.u0().coeffs())),
      state_(init_state(problem_, tau, n_steps)) {}

VectorXd SavBdf6Stepper::assemble_rhs(std::size_t n) const {
    const SpectralSpace& space = *problem_.space();
    const Field tail = history_convolution(state_.weights, std::span<const Field>(state_.w_history), n);
    const Field extrapolated = extrapolate_b6(std::span<const Field>(state_.u_bar_history));
    const VectorXd f_nodal = nonlinearity(eval_at_nodes(extrapolated).array()).matrix();

    VectorXd rhs = -tau_pow_ * space.apply_mass(tail.coeffs()) - space.load(f_nodal) - u0_stiffness_;
    if (problem_.mode() == ProblemMode::manufactured)
        rhs += space.load(problem_.forcing(space.nodes(), static_cast<double>(n) * state_.tau));
    return rhs;
}

const StepDiagnostics& SavBdf6Stepper::step() {
    const std::size_t n = state_.step + 1;
    if (n > state_.weights.n_max())
        throw ParameterError("stepper was sized for " + std::to_string(state_.weights.n_max()) +
                             " steps");
    const double tau = state_.tau;
    const double t = static_cast<double>(n) * tau;
    const SpectralSpace& space = *problem_.space();

    const VectorXd rhs = assemble_rhs(n);
    const Field w_bar = solver_.solve(rhs);
    const double residual = solver_.relative_residual(w_bar, rhs);
    const Field u_bar = w_bar + problem_.u0();
    const Field& u_bar_prev = state_.u_bar_history.front();

    const double e_bar = problem_.energy(u_bar);
    const double k_bar = discrete_K(u_bar, u_bar_prev, tau);
    const double denominator = 1.0 + tau * k_bar / e_bar;
    if (!(denominator > 0.0)) throw RelaxationBreakdown(n, denominator);

    double power = 0.0;
    if (options_.forcing_coupling == ForcingCoupling::forcing_power &&
        problem_.mode() == ProblemMode::manufactured) {
        const VectorXd rate = eval_at_nodes(u_bar - u_bar_prev) / tau;
        power = space.integrate(problem_.forcing(space.nodes(), t).cwiseProduct(rate));
    }

    const double r = (state_.r + tau * power) / denominator;
    const double xi = r / e_bar;
    const double eta = 1.0 - std::pow(1.0 - xi, 8);
    Field u = eta * u_bar;

    state_.w_history.push_back(u - problem_.u0());
    std::rotate(state_.u_bar_history.rbegin(), state_.u_bar_history.rbegin() + 1,
                state_.u_bar_history.rend());
    state_.u_bar_history.front() = u_bar;
    state_.u = std::move(u);
    state_.r = r;
    state_.xi = xi;
    state_.eta = eta;
    state_.step = n;

    StepDiagnostics d;
    d.n = n;
    d.t = t;
    d.r = r;
    d.xi = xi;
    d.eta = eta;
    d.energy_bar = e_bar;
    d.K_bar = k_bar;
    d.grad_norm_sq = grad_inner(state_.u, state_.u);
    d.solve_residual = residual;
    d.forcing_power = power;
    state_.diagnostics.push_back(d);
    return state_.diagnostics.back();
}

ErrorReport solution_error(const AllenCahnProblem& problem, const Field& u, double t) {
    const SpectralSpace& space = *problem.space();
    const VectorXd e = eval_at_nodes(u) - problem.exact(space.nodes(), t);
    return {e.cwiseAbs().maxCoeff(), std::sqrt(space.integrate(e.cwiseAbs2()))};
}

std::size_t step_count(double tau, double t_final) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    if (!(t_final >= 0.0)) throw ParameterError("final time must be non-negative");
    const double ratio = t_final / tau;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-12 * std::max(1.0, ratio))
        throw ParameterError("t_final / tau = " + std::to_string(ratio) + " is not an integer");
    return static_cast<std::size_t>(steps);
}

RunResult run(const AllenCahnProblem& problem, double tau, double t_final, StepperOptions options) {
    const std::size_t n_steps = step_count(tau, t_final);
    SavBdf6Stepper stepper(problem, tau, n_steps, options);
    for (std::size_t i = 0; i < n_steps; ++i) stepper.step();

    RunResult result{std::move(stepper).release(), std::nullopt};
    if (problem.mode() == ProblemMode::manufactured)
        result.errors = solution_error(problem, result.state.u, result.state.t());
    return result;
}

StabilityVerdict assess_stability(const SavState& state, double r0, double identity_tolerance) {
    StabilityVerdict v;
    double r_prev = r0;
    for (const StepDiagnostics& d : state.diagnostics) {
        if (d.r < 0.0) v.r_nonnegative = false;
        if (d.xi < 0.0) v.xi_nonnegative = false;
        if (d.K_bar < 0.0)
            v.negative_K_steps.push_back(d.n);
        else if (d.r > r_prev)
            v.r_monotone = false;
        const double defect = d.r - r_prev + state.tau * d.xi * d.K_bar - state.tau * d.forcing_power;
        v.max_identity_error = std::max(v.max_identity_error, std::abs(defect) / std::max(r_prev, 1e-300));
        r_prev = d.r;
    }
    v.pass = v.r_nonnegative && v.xi_nonnegative && v.r_monotone &&
             v.max_identity_error <= identity_tolerance;
    return v;
}

}  // namespace fracsav
