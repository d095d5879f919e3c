#include "doctest.h"

#include <cmath>
#include <thread>
#include <vector>

#include "fracsav/sav_stepper.hpp"
#include "oracles.hpp"

using namespace fracsav;

namespace {

double bump(double x) { return 0.1 * (1 - x * x); }

AllenCahnProblem manufactured(double alpha, std::size_t modes = 50) {
    return AllenCahnProblem::manufactured(SpectralSpace::build(modes), polynomial_manufactured(alpha));
}

/// Weak-form defect of the step that produced u_bar^n, assembled with dense
/// loops, oracle weights and oracle basis values:
///   g0 tau^-a M w_bar + S u_bar + tau^-a M sum_{j>=1} g_j w^{n-j} + (f(B6), phi) - (F, phi)
double independent_defect(const AllenCahnProblem& p, const std::vector<double>& g, double tau,
                          const std::vector<Field>& w, const std::vector<Field>& u_bar_hist,
                          const Field& u_bar, std::size_t n) {
    const SpectralSpace& sp = *p.space();
    const Eigen::Index N = static_cast<Eigen::Index>(sp.n_modes());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index k = 0; k < N; ++k) {
        M(k, k) = 2.0 / (2.0 * k + 1) + 2.0 / (2.0 * k + 5);
        if (k + 2 < N) M(k, k + 2) = M(k + 2, k) = -2.0 / (2.0 * k + 5);
    }
    const auto basis = oracle::dirichlet_basis(sp.nodes(), sp.n_modes()).value;
    const double tp = std::pow(tau, -p.alpha());

    Eigen::VectorXd hist = Eigen::VectorXd::Zero(N);
    for (std::size_t j = 1; j <= n; ++j) hist += g[j] * w[n - j].coeffs();
    Eigen::VectorXd ext = Eigen::VectorXd::Zero(N);
    const double b6[] = {6, -15, 20, -15, 6, -1};
    for (int j = 0; j < 6; ++j) ext += b6[j] * u_bar_hist[j].coeffs();

    Eigen::VectorXd defect(N);
    const Eigen::VectorXd w_bar = u_bar.coeffs() - p.u0().coeffs();
    const double t = static_cast<double>(n) * tau;
    const Eigen::VectorXd forcing = p.forcing(sp.nodes(), t);
    for (Eigen::Index k = 0; k < N; ++k) {
        double mass = 0;
        for (Eigen::Index l = 0; l < N; ++l) mass += M(k, l) * (g[0] * w_bar(l) + hist(l));
        double nonlinear = 0;
        for (Eigen::Index q = 0; q < basis.rows(); ++q) {
            double e = 0;
            for (Eigen::Index l = 0; l < N; ++l) e += basis(q, l) * ext(l);
            nonlinear += sp.weights()(q) * basis(q, k) * (e * e * e - e - forcing(q));
        }
        defect(k) = tp * mass + (4.0 * k + 6.0) * u_bar.coeffs()(k) + nonlinear;
    }
    return defect.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("initial state") {
    const auto p = manufactured(0.4, 12);
    const SavState s = init_state(p, 0.01, 10);
    CHECK(s.step == 0);
    CHECK(s.t() == 0.0);
    CHECK(s.w_history.size() == 1);
    CHECK(s.w_history[0].coeffs().isZero());
    CHECK(s.u_bar_history.size() == SavState::kExtrapolationLevels);
    for (const Field& f : s.u_bar_history) CHECK(f.coeffs() == p.u0().coeffs());
    CHECK(s.r == p.energy(p.u0()));
    CHECK(s.xi == 1.0);
    CHECK(s.eta == 1.0);
    CHECK(s.weights.n_max() == 10);
    CHECK(s.diagnostics.empty());
    CHECK_THROWS_AS(init_state(p, 0.0, 10), ParameterError);
}

TEST_CASE("zero initial data is a fixed point of the unforced problem") {
    const auto space = SpectralSpace::build(16);
    const auto p = AllenCahnProblem::unforced(space, 0.5, [](double) { return 0.0; });
    SavBdf6Stepper st(p, 0.05, 20);
    for (int i = 0; i < 20; ++i) {
        const StepDiagnostics& d = st.step();
        CHECK(d.xi == 1.0);
        CHECK(d.eta == 1.0);
        CHECK(d.K_bar == 0.0);
        CHECK(d.r == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK(st.state().u.coeffs().isZero());
}

TEST_CASE("unforced run is energy stable") {
    for (double alpha : {0.4, 0.8}) {
        CAPTURE(alpha);
        const auto p = AllenCahnProblem::unforced(SpectralSpace::build(50), alpha, bump);
        const RunResult res = run(p, 0.01, 1.0);
        CHECK(res.state.step == 100);
        CHECK_FALSE(res.errors.has_value());
        const double r0 = p.energy(p.u0());
        const StabilityVerdict v = assess_stability(res.state, r0);
        CHECK(v.pass);
        CHECK(v.r_nonnegative);
        CHECK(v.xi_nonnegative);
        CHECK(v.r_monotone);
        CHECK(v.max_identity_error <= kEnergyIdentityTolerance);

        double prev = r0;
        for (const StepDiagnostics& d : res.state.diagnostics) {
            // r^n - r^{n-1} = -tau xi^n K^n, checked directly from the records
            CHECK(std::abs(d.r - prev + 0.01 * d.xi * d.K_bar) <= 1e-12 * prev);
            CHECK(d.eta == 1.0 - std::pow(1.0 - d.xi, 8));
            CHECK(d.solve_residual <= 1e-10);
            prev = d.r;
        }
    }
}

TEST_CASE("stability verdict flags violations") {
    const auto p = AllenCahnProblem::unforced(SpectralSpace::build(8), 0.5, bump);
    SavBdf6Stepper st(p, 0.1, 3);
    for (int i = 0; i < 3; ++i) st.step();
    SavState s = st.state();
    const double r0 = p.energy(p.u0());
    CHECK(assess_stability(s, r0).pass);

    s.diagnostics[1].r = -1.0;
    const StabilityVerdict v = assess_stability(s, r0);
    CHECK_FALSE(v.pass);
    CHECK_FALSE(v.r_nonnegative);
    CHECK(v.max_identity_error > 1.0);
}

TEST_CASE("relaxation identity and solve residuals on the manufactured problem") {
    const auto p = manufactured(0.6, 30);
    SavBdf6Stepper st(p, 1.0 / 100, 100);
    for (int i = 0; i < 100; ++i) {
        const Field u_bar_prev = st.state().u_bar();
        const StepDiagnostics& d = st.step();
        CHECK(d.eta == 1.0 - std::pow(1.0 - d.xi, 8));
        CHECK(d.solve_residual <= 1e-10);
        CHECK((st.state().u.coeffs() - d.eta * st.state().u_bar().coeffs()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.K_bar == discrete_K(st.state().u_bar(), u_bar_prev, 1.0 / 100));
        CHECK(std::abs(d.xi - 1.0) < 0.2);
    }
}

TEST_CASE("independent weak-form residual") {
    const double alpha = 0.4, tau = 1.0 / 200;
    const std::size_t n_steps = 20;
    const auto p = manufactured(alpha, 20);
    const auto g = oracle::contour_dft_weights(alpha, n_steps, 1u << 12);
    SavBdf6Stepper st(p, tau, n_steps);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const std::vector<Field> w = st.state().w_history;
        const std::vector<Field> hist = st.state().u_bar_history;
        const Eigen::VectorXd rhs = st.assemble_rhs(n);
        st.step();
        const double defect = independent_defect(p, g, tau, w, hist, st.state().u_bar(), n);
        const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        CAPTURE(n);
        CHECK(defect / scale <= 1e-9);
    }
}

TEST_CASE("manufactured errors are small and sixth order") {
    const auto p = manufactured(0.4);
    const RunResult coarse = run(p, 1.0 / 200, 1.0);
    const RunResult fine = run(p, 1.0 / 400, 1.0);
    REQUIRE(coarse.errors);
    REQUIRE(fine.errors);
    // reference l_inf at tau = 1/200: 5.2278e-10
    CHECK(coarse.errors->linf < 10 * 5.2278e-10);
    CHECK(coarse.errors->linf > 5.2278e-10 / 10);
    const double ratio = coarse.errors->linf / fine.errors->linf;
    CHECK(ratio > 64 * 0.8);
    CHECK(ratio < 64 * 1.2);
    CHECK(coarse.errors->l2 <= coarse.errors->linf * std::sqrt(2.0));
}

TEST_CASE("zero-step run returns the projected initial data") {
    const auto p = manufactured(0.5, 20);
    const RunResult res = run(p, 0.1, 0.0);
    CHECK(res.state.step == 0);
    REQUIRE(res.errors);
    CHECK(res.errors->linf <= 1e-12);
}

TEST_CASE("forcing-power coupling breaks down on the manufactured problem") {
    const auto p = manufactured(0.4);
    StepperOptions opt;
    opt.forcing_coupling = ForcingCoupling::forcing_power;
    SavBdf6Stepper coupled(p, 1.0 / 200, 200, opt);
    std::size_t failed_at = 0;
    try {
        for (int i = 0; i < 200; ++i) coupled.step();
    } catch (const RelaxationBreakdown& e) {
        failed_at = e.step();
        CHECK(e.denominator() <= 0.0);
    }
    CHECK(failed_at == 196);
    CHECK(coupled.state().diagnostics.front().forcing_power != 0.0);
}

TEST_CASE("step bookkeeping errors") {
    const auto p = manufactured(0.5, 8);
    SavBdf6Stepper st(p, 0.05, 2);
    st.step();
    st.step();
    CHECK_THROWS_AS(st.step(), ParameterError);
    CHECK(st.state().step == 2);
    CHECK(st.state().t() == 0.1);

    CHECK(step_count(1.0 / 200, 1.0) == 200);
    CHECK(step_count(0.1, 0.3) == 3);
    CHECK(step_count(0.1, 0.0) == 0);
    CHECK_THROWS_AS(step_count(0.3, 1.0), ParameterError);
    CHECK_THROWS_AS(step_count(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(step_count(0.1, -1.0), ParameterError);
    CHECK_THROWS_AS(SavBdf6Stepper(p, -0.1, 4), ParameterError);
}

TEST_CASE("independent runs on separate threads are deterministic") {
    const auto p = manufactured(0.8, 24);
    RunResult a{init_state(p, 0.02, 0), std::nullopt}, b = a;
    {
        std::jthread t1([&] { a = run(p, 0.02, 1.0); });
        std::jthread t2([&] { b = run(p, 0.02, 1.0); });
    }
    const RunResult c = run(p, 0.02, 1.0);
    CHECK(a.state.u.coeffs() == b.state.u.coeffs());
    CHECK(a.state.u.coeffs() == c.state.u.coeffs());
    CHECK(a.state.r == c.state.r);
}
