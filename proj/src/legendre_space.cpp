#include "fracsav/legendre_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fracsav {

MatrixXd legendre_table(const VectorXd& x, std::size_t degree) {
    const Eigen::Index n = static_cast<Eigen::Index>(degree);
    MatrixXd L(x.size(), n + 1);
    L.col(0).setOnes();
    if (n >= 1) L.col(1) = x;
    for (Eigen::Index k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        L.col(k) = ((2 * kk - 1) * x.cwiseProduct(L.col(k - 1)) - (kk - 1) * L.col(k - 2)) / kk;
    }
    return L;
}

QuadratureRule lgl_rule(std::size_t points) {
    if (points < 2) throw ParameterError("Gauss-Lobatto rule needs at least 2 points");
    const std::size_t degree = points - 1;
    const Eigen::Index q = static_cast<Eigen::Index>(points);

    // Newton iteration on (1 - x^2) L'_N from Chebyshev-Gauss-Lobatto guesses.
    VectorXd x(q);
    for (Eigen::Index i = 0; i < q; ++i)
        x(i) = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(degree));

    MatrixXd L;
    for (int iter = 0; iter < 100; ++iter) {
        L = legendre_table(x, degree);
        const VectorXd ln = L.col(static_cast<Eigen::Index>(degree));
        const VectorXd lm = L.col(static_cast<Eigen::Index>(degree - 1));
        const VectorXd step =
            (x.cwiseProduct(ln) - lm).cwiseQuotient(static_cast<double>(points) * ln);
        x -= step;
        if (step.cwiseAbs().maxCoeff() < 1e-14) break;
    }
    for (Eigen::Index i = 0; i < q / 2; ++i) {
        const double s = 0.5 * (x(q - 1 - i) - x(i));
        x(i) = -s;
        x(q - 1 - i) = s;
    }
    if (q % 2 == 1) x(q / 2) = 0.0;
    x(0) = -1.0;
    x(q - 1) = 1.0;

    L = legendre_table(x, degree);
    const VectorXd ln = L.col(static_cast<Eigen::Index>(degree));
    QuadratureRule rule;
    rule.nodes = x;
    rule.weights = (2.0 / static_cast<double>(degree * points)) * ln.cwiseAbs2().cwiseInverse();
    return rule;
}

std::size_t default_quad_points(std::size_t n_modes) {
    return std::max((3 * n_modes + 1) / 2 + 4, n_modes + 8);
}

std::shared_ptr<const SpectralSpace> SpectralSpace::build(std::size_t n_modes,
                                                          std::size_t quad_points) {
    if (n_modes < 1) throw ParameterError("spectral space needs at least one mode");
    if (quad_points < n_modes + 8)
        throw ParameterError("quadrature needs at least n_modes + 8 = " +
                             std::to_string(n_modes + 8) + " points, got " +
                             std::to_string(quad_points));

    std::shared_ptr<SpectralSpace> s(new SpectralSpace());
    const Eigen::Index n = static_cast<Eigen::Index>(n_modes);
    s->n_modes_ = n_modes;
    s->rule_ = lgl_rule(quad_points);

    const MatrixXd L = legendre_table(s->rule_.nodes, n_modes + 1);
    s->basis_ = L.leftCols(n) - L.middleCols(2, n);

    s->stiffness_.resize(n);
    s->mass_bands_ = MatrixXd::Zero(3, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        s->stiffness_(k) = 4 * kk + 6;
        s->mass_bands_(0, k) = 2 / (2 * kk + 1) + 2 / (2 * kk + 5);
        if (k >= 2) s->mass_bands_(2, k) = -2 / (2 * (kk - 2) + 5);
    }
    s->mass_factor_.compute(s->mass_bands_);
    return s;
}

MatrixXd SpectralSpace::mass_matrix() const {
    const Eigen::Index n = static_cast<Eigen::Index>(n_modes_);
    MatrixXd m = MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k, k) = mass_bands_(0, k);
        if (k >= 2) m(k, k - 2) = m(k - 2, k) = mass_bands_(2, k);
    }
    return m;
}

MatrixXd SpectralSpace::stiffness_matrix() const { return stiffness_.asDiagonal(); }

VectorXd SpectralSpace::apply_mass(const VectorXd& c) const {
    return banded_symmetric_apply(mass_bands_, c);
}

VectorXd SpectralSpace::load(const VectorXd& nodal) const {
    if (nodal.size() != rule_.nodes.size())
        throw ShapeError("nodal vector has " + std::to_string(nodal.size()) + " entries, space has " +
                         std::to_string(rule_.nodes.size()) + " nodes");
    return basis_.transpose() * rule_.weights.cwiseProduct(nodal);
}

Field::Field(SpaceHandle space) : space_(std::move(space)) {
    if (!space_) throw ShapeError("field needs a space");
    coeffs_ = VectorXd::Zero(static_cast<Eigen::Index>(space_->n_modes()));
}

Field::Field(SpaceHandle space, VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (!space_) throw ShapeError("field needs a space");
    if (coeffs_.size() != static_cast<Eigen::Index>(space_->n_modes()))
        throw ShapeError("coefficient vector length does not match the number of modes");
}

void require_same_space(const Field& a, const Field& b) {
    if (a.space() != b.space()) throw ShapeError("fields belong to different spaces");
}

Field& Field::operator+=(const Field& other) {
    require_same_space(*this, other);
    coeffs_ += other.coeffs_;
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_space(*this, other);
    coeffs_ -= other.coeffs_;
    return *this;
}

Field project(const SpaceHandle& space, const VectorXd& values_at_nodes) {
    return Field(space, space->analyze(values_at_nodes));
}

VectorXd eval_at_nodes(const Field& f) { return f.space()->synthesize(f.coeffs()); }

double l2_inner(const Field& a, const Field& b) {
    require_same_space(a, b);
    return a.coeffs().dot(a.space()->apply_mass(b.coeffs()));
}

double grad_inner(const Field& a, const Field& b) {
    require_same_space(a, b);
    return a.coeffs().dot(a.space()->apply_stiffness(b.coeffs()));
}

double linf_nodal(const Field& a) { return eval_at_nodes(a).cwiseAbs().maxCoeff(); }

ShiftedLaplacianSolver::ShiftedLaplacianSolver(SpaceHandle space, double sigma)
    : space_(std::move(space)), sigma_(sigma) {
    if (!(sigma > 0.0)) throw ParameterError("shift sigma must be positive");
    bands_ = sigma * space_->mass_bands();
    bands_.row(0) += space_->stiffness_diagonal().transpose();
    factor_.compute(bands_);
}

Field ShiftedLaplacianSolver::solve(const VectorXd& rhs) const {
    return Field(space_, factor_.solve(rhs));
}

VectorXd ShiftedLaplacianSolver::apply(const VectorXd& c) const {
    return banded_symmetric_apply(bands_, c);
}

double ShiftedLaplacianSolver::relative_residual(const Field& solution, const VectorXd& rhs) const {
    const double r = (apply(solution.coeffs()) - rhs).cwiseAbs().maxCoeff();
    const double scale = rhs.cwiseAbs().maxCoeff();
    return scale > 0.0 ? r / scale : r;
}

Field solve_shifted_laplacian(const SpaceHandle& space, double sigma, const VectorXd& rhs) {
    return ShiftedLaplacianSolver(space, sigma).solve(rhs);
}

}  // namespace fracsav
