#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "fracsav/legendre_space.hpp"
#include "oracles.hpp"

using namespace fracsav;

namespace {

/// sup-norm error of a Field against g on a fine uniform grid, evaluated
/// through the oracle basis rather than the space's own tables.
template <typename G>
double fine_grid_error(const Field& f, G&& g) {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(2001, -1.0, 1.0);
    const auto basis = oracle::dirichlet_basis(x, f.space()->n_modes());
    const Eigen::VectorXd v = basis.value * f.coeffs();
    double err = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) err = std::max(err, std::abs(v(i) - g(x(i))));
    return err;
}

}  // namespace

TEST_CASE("LGL rule") {
    for (std::size_t q : {3u, 8u, 17u, 40u, 83u}) {
        CAPTURE(q);
        const QuadratureRule r = lgl_rule(q);
        REQUIRE(r.nodes.size() == static_cast<Eigen::Index>(q));
        CHECK(r.nodes(0) == -1.0);
        CHECK(r.nodes(q - 1) == 1.0);
        CHECK(std::abs(r.weights.sum() - 2.0) <= 1e-14);
        for (std::size_t i = 0; i + 1 < q; ++i) CHECK(r.nodes(i) < r.nodes(i + 1));
        for (std::size_t i = 0; i < q; ++i) {
            CHECK(r.nodes(i) == -r.nodes(q - 1 - i));
            CHECK(r.weights(i) > 0.0);
        }
        // exact for monomials up to degree 2q - 3
        for (std::size_t d = 0; d <= 2 * q - 3; ++d) {
            const double exact = d % 2 ? 0.0 : 2.0 / static_cast<double>(d + 1);
            const double got = r.weights.dot(r.nodes.array().pow(static_cast<double>(d)).matrix());
            CHECK(std::abs(got - exact) <= 1e-13);
        }
        // endpoint weight 2 / (q (q - 1))
        CHECK(std::abs(r.weights(0) - 2.0 / static_cast<double>(q * (q - 1))) <= 1e-15);
    }
    CHECK_THROWS_AS(lgl_rule(1), ParameterError);
}

TEST_CASE("Legendre table against the oracle recurrence") {
    const Eigen::VectorXd x = oracle::random_vector(23);
    const Eigen::MatrixXd t = legendre_table(x, 30);
    const auto ref = oracle::legendre_derivs(x, 30);
    CHECK((t - ref.value).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("default quadrature size") {
    CHECK(default_quad_points(1) == 9);
    CHECK(default_quad_points(8) == 16);
    CHECK(default_quad_points(20) == 34);
    CHECK(default_quad_points(50) == 79);
}

TEST_CASE("stiffness and mass matrices") {
    const auto space = SpectralSpace::build(4);
    CHECK(space->stiffness_matrix().diagonal() == Eigen::Vector4d(6, 10, 14, 18));
    CHECK(space->mass_matrix()(0, 0) == doctest::Approx(12.0 / 5.0).epsilon(1e-15));
    CHECK(space->mass_matrix()(0, 2) == doctest::Approx(-2.0 / 5.0).epsilon(1e-15));
    CHECK(space->mass_matrix()(0, 1) == 0.0);

    // Independent oracle: composite Gauss quadrature of products of the basis.
    const std::size_t n = 8;
    const auto s8 = SpectralSpace::build(n);
    const Eigen::MatrixXd M = s8->mass_matrix(), S = s8->stiffness_matrix();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const auto jj = static_cast<Eigen::Index>(j), kk = static_cast<Eigen::Index>(k);
            auto at = [&](double x) { return oracle::dirichlet_basis(Eigen::VectorXd::Constant(1, x), n); };
            const double m = oracle::gauss_composite(
                [&](double x) {
                    const auto b = at(x);
                    return b.value(0, jj) * b.value(0, kk);
                },
                -1.0, 1.0);
            const double s = oracle::gauss_composite(
                [&](double x) {
                    const auto b = at(x);
                    return b.d1(0, jj) * b.d1(0, kk);
                },
                -1.0, 1.0);
            CHECK(std::abs(M(jj, kk) - m) <= 1e-13);
            CHECK(std::abs(S(jj, kk) - s) <= 1e-12);
        }

    // quadrature-assembled mass matches the closed form
    const Eigen::MatrixXd B = s8->basis();
    const Eigen::MatrixXd Mq = B.transpose() * s8->weights().asDiagonal() * B;
    CHECK((Mq - M).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("space construction errors") {
    CHECK_THROWS_AS(SpectralSpace::build(0), ParameterError);
    CHECK_THROWS_AS(SpectralSpace::build(10, 17), ParameterError);
    CHECK_NOTHROW(SpectralSpace::build(10, 18));
}

TEST_CASE("projection and synthesis") {
    const auto space = SpectralSpace::build(12);
    const Eigen::VectorXd x = space->nodes();

    const Field p = project(space, (1.0 - x.array().square()).matrix());
    CHECK(std::abs(p.coeffs()(0) - 2.0 / 3.0) <= 1e-15);
    CHECK(p.coeffs().tail(11).cwiseAbs().maxCoeff() <= 1e-15);

    const Eigen::VectorXd c = oracle::random_vector(12);
    const Eigen::VectorXd back = space->analyze(space->synthesize(c));
    CHECK((back - c).cwiseAbs().maxCoeff() <= 1e-12);

    const Field f(space, c);
    CHECK((eval_at_nodes(f) - space->synthesize(c)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(linf_nodal(p) - (1.0 - x.array().square()).maxCoeff()) <= 1e-15);
}

TEST_CASE("inner products") {
    const auto space = SpectralSpace::build(6);
    Field a(space), b(space);
    a.coeffs()(0) = 1.0;
    b.coeffs()(2) = 1.0;
    CHECK(l2_inner(a, b) == doctest::Approx(-2.0 / 5.0).epsilon(1e-15));
    for (Eigen::Index k = 0; k < 6; ++k) {
        Field e(space);
        e.coeffs()(k) = 1.0;
        CHECK(grad_inner(e, e) == doctest::Approx(4.0 * k + 6.0));
    }
    const Field r1(space, oracle::random_vector(6)), r2(space, oracle::random_vector(6));
    CHECK(std::abs(l2_inner(r1, r2) - space->integrate(eval_at_nodes(r1).cwiseProduct(eval_at_nodes(r2)))) <= 1e-14);
    CHECK(l2_inner(r1, r2) == doctest::Approx(l2_inner(r2, r1)).epsilon(1e-14));
}

TEST_CASE("fields from different spaces do not mix") {
    const auto s1 = SpectralSpace::build(6), s2 = SpectralSpace::build(6);
    Field a(s1), b(s2);
    CHECK_THROWS_AS(a += b, ShapeError);
    CHECK_THROWS_AS(l2_inner(a, b), ShapeError);
    CHECK_THROWS_AS(grad_inner(a, b), ShapeError);
    CHECK_THROWS_AS(Field(s1, Eigen::VectorXd::Zero(5)), ShapeError);
    CHECK_NOTHROW(a += Field(s1));
    const Field c = 2.0 * (a + Field(s1, Eigen::VectorXd::Ones(6))) - Field(s1);
    CHECK(c.coeffs() == Eigen::VectorXd::Constant(6, 2.0));
}

TEST_CASE("shifted Laplacian solver") {
    for (std::size_t n : {4u, 20u, 50u}) {
        const auto space = SpectralSpace::build(n);
        for (double sigma : {1e-3, 1.0, 2.45 * 200.0}) {
            CAPTURE(n);
            CAPTURE(sigma);
            const ShiftedLaplacianSolver solver(space, sigma);
            const Eigen::MatrixXd A = sigma * space->mass_matrix() + space->stiffness_matrix();
            const Eigen::VectorXd b = oracle::random_vector(static_cast<Eigen::Index>(n));
            const Field x = solver.solve(b);
            const Eigen::VectorXd ref = A.llt().solve(b);
            CHECK((x.coeffs() - ref).cwiseAbs().maxCoeff() <= 1e-11 * ref.cwiseAbs().maxCoeff());
            CHECK(solver.relative_residual(x, b) <= 1e-13);
            CHECK((solver.apply(ref) - A * ref).cwiseAbs().maxCoeff() <= 1e-11);
        }
    }

    // -u'' + u = 3 - x^2 with u = 1 - x^2
    const auto space = SpectralSpace::build(16);
    const Eigen::VectorXd x = space->nodes();
    const Field u = solve_shifted_laplacian(space, 1.0, space->load((3.0 - x.array().square()).matrix()));
    CHECK(std::abs(u.coeffs()(0) - 2.0 / 3.0) <= 1e-14);
    CHECK(u.coeffs().tail(15).cwiseAbs().maxCoeff() <= 1e-14);

    CHECK_THROWS_AS(ShiftedLaplacianSolver(space, 0.0), ParameterError);
    CHECK_THROWS_AS(ShiftedLaplacianSolver(space, -1.0), ParameterError);
}

TEST_CASE("spectral accuracy of the Helmholtz solve") {
    // -u'' + u = f with u = sin(2x)(1 - x^2)
    auto u = [](double x) { return std::sin(2 * x) * (1 - x * x); };
    auto f = [](double x) {
        const double s = std::sin(2 * x), c = std::cos(2 * x);
        const double upp = -4 * s * (1 - x * x) - 8 * x * c - 2 * s;
        return -upp + s * (1 - x * x);
    };
    double prev = 1.0;
    for (std::size_t n : {4u, 8u, 12u}) {
        const auto space = SpectralSpace::build(n);
        const Field sol = solve_shifted_laplacian(space, 1.0, space->load(space->nodes().unaryExpr(f)));
        const double err = fine_grid_error(sol, u);
        CAPTURE(n);
        CAPTURE(err);
        CHECK(err < 1e-2 * prev);
        prev = err;
    }
    const auto space = SpectralSpace::build(24);
    const Field sol = solve_shifted_laplacian(space, 1.0, space->load(space->nodes().unaryExpr(f)));
    CHECK(fine_grid_error(sol, u) < 1e-13);
}

TEST_CASE("banded Cholesky on a generic band matrix") {
    const Eigen::Index n = 30, p = 3;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 1; d <= p && i - d >= 0; ++d) A(i, i - d) = A(i - d, i) = oracle::uniform(-1, 1);
    for (Eigen::Index i = 0; i < n; ++i) A(i, i) = 2.0 * p + 1.0;
    Eigen::MatrixXd bands = Eigen::MatrixXd::Zero(p + 1, n);
    for (Eigen::Index d = 0; d <= p; ++d)
        for (Eigen::Index i = d; i < n; ++i) bands(d, i) = A(i, i - d);
    const BandedCholesky<double> chol(bands);
    const Eigen::VectorXd b = oracle::random_vector(n);
    CHECK((chol.solve(b) - A.llt().solve(b)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((banded_symmetric_apply(bands, b) - A * b).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK_THROWS_AS(chol.solve(Eigen::VectorXd::Zero(n - 1)), ShapeError);

    Eigen::MatrixXd indefinite = bands;
    indefinite(0, 5) = -1.0;
    CHECK_THROWS_AS(BandedCholesky<double>{indefinite}, NumericalError);
}
