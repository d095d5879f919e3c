#include "fracsav/allen_cahn.hpp"

#include <cmath>

#include "fracsav/cq_weights.hpp"

namespace fracsav {

double energy(const Field& v, double c0_shift) {
    const VectorXd nodal = eval_at_nodes(v);
    return 0.5 * grad_inner(v, v) + v.space()->integrate(potential(nodal.array()).matrix()) + c0_shift;
}

double discrete_K(const Field& u_cur, const Field& u_prev, double tau) {
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    require_same_space(u_cur, u_prev);
    const Field rate = (1.0 / tau) * (u_cur - u_prev);
    const VectorXd f = nonlinearity(eval_at_nodes(u_cur).array()).matrix();
    const double reaction = u_cur.space()->integrate(f.cwiseProduct(eval_at_nodes(rate)));
    return -(grad_inner(u_cur, rate) + reaction);
}

ManufacturedSolution polynomial_manufactured(double alpha) {
    detail::check_alpha(alpha);
    ManufacturedSolution s;
    s.alpha = alpha;
    s.exact = [](double x, double t) { return (std::pow(t, 10) + 0.1) * (1.0 - x * x); };
    const double gamma_ratio = std::tgamma(11.0) / std::tgamma(11.0 - alpha);
    s.caputo = [alpha, gamma_ratio](double x, double t) {
        return gamma_ratio * std::pow(t, 10.0 - alpha) * (1.0 - x * x);
    };
    s.laplacian = [](double, double t) { return -2.0 * (std::pow(t, 10) + 0.1); };
    return s;
}

std::string to_string(ProblemMode mode) {
    return mode == ProblemMode::unforced ? "unforced" : "manufactured";
}

ProblemMode parse_mode(const std::string& text) {
    if (text == "unforced") return ProblemMode::unforced;
    if (text == "manufactured") return ProblemMode::manufactured;
    throw ParameterError("unknown mode '" + text + "' (expected unforced or manufactured)");
}

AllenCahnProblem::AllenCahnProblem(SpaceHandle space, Field u0, double alpha, double c0_shift,
                                   std::optional<ManufacturedSolution> solution)
    : space_(std::move(space)), u0_(std::move(u0)), alpha_(alpha), c0_shift_(c0_shift),
      solution_(std::move(solution)) {
    detail::check_alpha(alpha_);
    if (!(c0_shift_ >= 0.0)) throw ParameterError("energy shift must be non-negative");
}

AllenCahnProblem AllenCahnProblem::unforced(SpaceHandle space, double alpha,
                                            const std::function<double(double)>& u0,
                                            double c0_shift) {
    const VectorXd values = space->nodes().unaryExpr(u0);
    Field initial = project(space, values);
    return AllenCahnProblem(std::move(space), std::move(initial), alpha, c0_shift, std::nullopt);
}

AllenCahnProblem AllenCahnProblem::manufactured(SpaceHandle space, ManufacturedSolution solution,
                                                double c0_shift) {
    if (!solution.exact || !solution.caputo || !solution.laplacian)
        throw ParameterError("manufactured solution is incomplete");
    const auto& exact = solution.exact;
    const VectorXd values = space->nodes().unaryExpr([&](double x) { return exact(x, 0.0); });
    Field initial = project(space, values);
    const double alpha = solution.alpha;
    return AllenCahnProblem(std::move(space), std::move(initial), alpha, c0_shift,
                            std::move(solution));
}

VectorXd AllenCahnProblem::forcing(const VectorXd& x, double t) const {
    if (!solution_) return VectorXd::Zero(x.size());
    return manufactured_forcing(*solution_, x, t);
}

VectorXd AllenCahnProblem::exact(const VectorXd& x, double t) const {
    if (!solution_) throw ParameterError("exact solution is only available in manufactured mode");
    return x.unaryExpr([&](double xi) { return solution_->exact(xi, t); });
}

VectorXd manufactured_forcing(const ManufacturedSolution& solution, const VectorXd& x, double t) {
    VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double u = solution.exact(x(i), t);
        out(i) = solution.caputo(x(i), t) - solution.laplacian(x(i), t) + nonlinearity(u);
    }
    return out;
}

}  // namespace fracsav
