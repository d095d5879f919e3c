#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Core>

#include "fracsav/banded_cholesky.hpp"
#include "fracsav/errors.hpp"

namespace fracsav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Legendre polynomials L_0..L_{degree} evaluated at each x; row q holds x_q.
MatrixXd legendre_table(const VectorXd& x, std::size_t degree);

/// Legendre-Gauss-Lobatto rule with `points` nodes on [-1, 1], ascending.
struct QuadratureRule {
    VectorXd nodes;
    VectorXd weights;
};

QuadratureRule lgl_rule(std::size_t points);

/// Default quadrature size for N modes: max(ceil(3N/2) + 4, N + 8).
std::size_t default_quad_points(std::size_t n_modes);

/// Legendre-Galerkin space on (-1, 1) with homogeneous Dirichlet conditions,
/// spanned by phi_k = L_k - L_{k+2}, k = 0..N-1.
///
/// In this basis the stiffness matrix is diag(4k + 6) and the mass matrix is
/// pentadiagonal with a zero first off-diagonal:
///   M_kk = 2/(2k+1) + 2/(2k+5),  M_{k,k+2} = -2/(2k+5).
/// Immutable once built; share it through `std::shared_ptr<const SpectralSpace>`.
class SpectralSpace {
public:
    static std::shared_ptr<const SpectralSpace> build(std::size_t n_modes, std::size_t quad_points);
    static std::shared_ptr<const SpectralSpace> build(std::size_t n_modes) {
        return build(n_modes, default_quad_points(n_modes));
    }

    std::size_t n_modes() const { return n_modes_; }
    std::size_t quad_points() const { return static_cast<std::size_t>(rule_.nodes.size()); }
    const VectorXd& nodes() const { return rule_.nodes; }
    const VectorXd& weights() const { return rule_.weights; }

    /// basis()(q, k) = phi_k(x_q)
    const MatrixXd& basis() const { return basis_; }

    /// Lower bands of M: row 0 diagonal, row 2 second sub-diagonal.
    const MatrixXd& mass_bands() const { return mass_bands_; }
    const VectorXd& stiffness_diagonal() const { return stiffness_; }
    MatrixXd mass_matrix() const;
    MatrixXd stiffness_matrix() const;

    VectorXd apply_mass(const VectorXd& c) const;
    VectorXd apply_stiffness(const VectorXd& c) const { return stiffness_.cwiseProduct(c); }

    /// b_k = sum_q w_q phi_k(x_q) v(x_q)
    VectorXd load(const VectorXd& nodal) const;
    /// v(x_q) = sum_k c_k phi_k(x_q)
    VectorXd synthesize(const VectorXd& c) const { return basis_ * c; }
    /// c = M^{-1} load(v)
    VectorXd analyze(const VectorXd& nodal) const { return mass_factor_.solve(load(nodal)); }

    /// Quadrature of nodal values over the domain.
    double integrate(const VectorXd& nodal) const { return rule_.weights.dot(nodal); }

private:
    SpectralSpace() = default;

    std::size_t n_modes_ = 0;
    QuadratureRule rule_;
    MatrixXd basis_;
    MatrixXd mass_bands_;
    VectorXd stiffness_;
    BandedCholesky<double> mass_factor_;
};

using SpaceHandle = std::shared_ptr<const SpectralSpace>;

/// A function in a SpectralSpace, stored by its modal coefficients.
class Field {
public:
    explicit Field(SpaceHandle space);
    Field(SpaceHandle space, VectorXd coeffs);

    static Field zero(const SpaceHandle& space) { return Field(space); }

    const SpaceHandle& space() const { return space_; }
    const VectorXd& coeffs() const { return coeffs_; }
    VectorXd& coeffs() { return coeffs_; }
    Eigen::Index size() const { return coeffs_.size(); }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s) {
        coeffs_ *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
    friend Field operator*(Field a, double s) { return a *= s; }

private:
    SpaceHandle space_;
    VectorXd coeffs_;
};

/// Throws ShapeError unless both fields live in the same space object.
void require_same_space(const Field& a, const Field& b);

/// Discrete Galerkin projection of nodal values: solve M c = b.
Field project(const SpaceHandle& space, const VectorXd& values_at_nodes);
VectorXd eval_at_nodes(const Field& f);

double l2_inner(const Field& a, const Field& b);
double grad_inner(const Field& a, const Field& b);
double linf_nodal(const Field& a);

/// Direct solver for (sigma M + S) c = b; the band factor is computed once.
class ShiftedLaplacianSolver {
public:
    ShiftedLaplacianSolver(SpaceHandle space, double sigma);

    double sigma() const { return sigma_; }
    const SpaceHandle& space() const { return space_; }

    /// rhs is a load (dual) vector.
    Field solve(const VectorXd& rhs) const;
    /// (sigma M + S) c
    VectorXd apply(const VectorXd& c) const;
    /// ||(sigma M + S) c - rhs||_inf / ||rhs||_inf (absolute when rhs = 0)
    double relative_residual(const Field& solution, const VectorXd& rhs) const;

private:
    SpaceHandle space_;
    double sigma_;
    MatrixXd bands_;
    BandedCholesky<double> factor_;
};

Field solve_shifted_laplacian(const SpaceHandle& space, double sigma, const VectorXd& rhs);

}  // namespace fracsav
