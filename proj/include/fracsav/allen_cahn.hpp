#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "fracsav/errors.hpp"
#include "fracsav/legendre_space.hpp"

namespace fracsav {

/// Ginzburg-Landau double well F(u) = (u^2 - 1)^2 / 4.
inline double potential(double u) {
    const double s = u * u - 1.0;
    return 0.25 * s * s;
}

/// f(u) = F'(u) = u^3 - u.
inline double nonlinearity(double u) { return u * u * u - u; }

template <typename Derived>
auto potential(const Eigen::ArrayBase<Derived>& u) {
    return 0.25 * (u.square() - 1.0).square();
}

template <typename Derived>
auto nonlinearity(const Eigen::ArrayBase<Derived>& u) {
    return u.cube() - u;
}

/// E(v) = (grad v, grad v)/2 + (F(v), 1) + c0_shift.
double energy(const Field& v, double c0_shift = 0.0);

/// K(u) = -(-Lap u + f(u), (u - u_prev)/tau), with the Laplacian term
/// integrated by parts against the Dirichlet basis.
double discrete_K(const Field& u_cur, const Field& u_prev, double tau);

/// Six-level extrapolation 6u1 - 15u2 + 20u3 - 15u4 + 6u5 - u6, where
/// history[0] is the most recent level.
inline constexpr std::array<double, 6> kB6Weights{6.0, -15.0, 20.0, -15.0, 6.0, -1.0};

template <typename V>
V extrapolate_b6(std::span<const V> history) {
    if (history.size() < kB6Weights.size())
        throw StartupPolicyError("six-level extrapolation needs 6 history levels, got " +
                                 std::to_string(history.size()));
    V acc = kB6Weights[0] * history[0];
    for (std::size_t j = 1; j < kB6Weights.size(); ++j) acc += kB6Weights[j] * history[j];
    return acc;
}

/// Space-time function u(x, t) together with the pieces needed to build its
/// forcing: the Caputo derivative of u - u(., 0) and the Laplacian.
struct ManufacturedSolution {
    double alpha = 0;
    std::function<double(double, double)> exact;
    std::function<double(double, double)> caputo;
    std::function<double(double, double)> laplacian;
};

/// u(x, t) = (t^10 + 0.1)(1 - x^2).
ManufacturedSolution polynomial_manufactured(double alpha);

enum class ProblemMode { unforced, manufactured };

std::string to_string(ProblemMode mode);
ProblemMode parse_mode(const std::string& text);

/// Time-fractional Allen-Cahn problem on (-1, 1) with homogeneous Dirichlet
/// data. Immutable after construction.
class AllenCahnProblem {
public:
    /// Unforced problem from nodal initial data u0(x).
    static AllenCahnProblem unforced(SpaceHandle space, double alpha,
                                     const std::function<double(double)>& u0,
                                     double c0_shift = 0.0);
    /// Forced problem whose exact solution is `solution`; u0 is its t = 0 slice.
    static AllenCahnProblem manufactured(SpaceHandle space, ManufacturedSolution solution,
                                         double c0_shift = 0.0);

    const SpaceHandle& space() const { return space_; }
    const Field& u0() const { return u0_; }
    double alpha() const { return alpha_; }
    double c0_shift() const { return c0_shift_; }
    ProblemMode mode() const { return solution_ ? ProblemMode::manufactured : ProblemMode::unforced; }
    const std::optional<ManufacturedSolution>& solution() const { return solution_; }

    double energy(const Field& v) const { return fracsav::energy(v, c0_shift_); }

    /// Forcing F = caputo(u - u0) - Lap u + f(u) at the given points.
    /// Zero in unforced mode.
    VectorXd forcing(const VectorXd& x, double t) const;
    /// Exact solution at the given points (manufactured mode only).
    VectorXd exact(const VectorXd& x, double t) const;

private:
    AllenCahnProblem(SpaceHandle space, Field u0, double alpha, double c0_shift,
                     std::optional<ManufacturedSolution> solution);

    SpaceHandle space_;
    Field u0_;
    double alpha_;
    double c0_shift_;
    std::optional<ManufacturedSolution> solution_;
};

/// Forcing of the manufactured problem at points x and time t.
VectorXd manufactured_forcing(const ManufacturedSolution& solution, const VectorXd& x, double t);

}  // namespace fracsav
