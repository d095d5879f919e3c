#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fracsav/cq_weights.hpp"

namespace fracsav {

/// Six-step multiplier (mu_1, ..., mu_6). Only the first three are nonzero, and
/// 1 - mu_1 z - mu_2 z^2 - mu_3 z^3 = (1 - z/2)^2 (1 - 4z/9).
struct MultiplierSet {
    std::array<Rational, 6> mu;
};

constexpr MultiplierSet multiplier_set() {
    return MultiplierSet{{Rational(13, 9), Rational(-25, 36), Rational(1, 9), Rational(0),
                          Rational(0), Rational(0)}};
}

template <typename Scalar = double>
struct MultiplierSeries {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Scalar alpha{};
    Vector q;

    std::size_t n_max() const { return static_cast<std::size_t>(q.size()) - 1; }
    Scalar operator[](std::size_t j) const { return q(static_cast<Eigen::Index>(j)); }
};

/// Prefactors (9^{l+1}(l-7) + 8^{l+2}) / 18^l for l = 0..n_max, written as
/// 9(l-7)(1/2)^l + 64(4/9)^l and built by repeated multiplication so that no
/// power of 9 or 8 is ever formed.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q_prefactors(std::size_t n_max) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p(static_cast<Eigen::Index>(n_max + 1));
    Scalar half_pow(1);
    Scalar four_ninths_pow(1);
    for (std::size_t l = 0; l <= n_max; ++l) {
        p(static_cast<Eigen::Index>(l)) =
            Scalar(9) * (Scalar(l) - Scalar(7)) * half_pow + Scalar(64) * four_ninths_pow;
        half_pow *= Scalar(9) / Scalar(18);
        four_ninths_pow *= Scalar(8) / Scalar(18);
    }
    return p;
}

/// q_j = sum_{l=0}^{j} prefactor_l g_{j-l}. Each sum is accumulated from the
/// largest-magnitude term downwards.
template <typename Scalar = double>
MultiplierSeries<Scalar> q_weights(const CQWeights<Scalar>& w) {
    const std::size_t n_max = w.n_max();
    const auto pre = q_prefactors<Scalar>(n_max);

    MultiplierSeries<Scalar> s;
    s.alpha = w.alpha;
    s.q.resize(static_cast<Eigen::Index>(n_max + 1));
    std::vector<Scalar> terms;
    terms.reserve(n_max + 1);
    for (std::size_t j = 0; j <= n_max; ++j) {
        terms.clear();
        for (std::size_t l = 0; l <= j; ++l)
            terms.push_back(pre(static_cast<Eigen::Index>(l)) * w[j - l]);
        std::sort(terms.begin(), terms.end(),
                  [](Scalar a, Scalar b) { return std::abs(a) > std::abs(b); });
        Scalar acc(0);
        for (Scalar t : terms) acc += t;
        s.q(static_cast<Eigen::Index>(j)) = acc;
    }
    return s;
}

template <typename Scalar = double>
MultiplierSeries<Scalar> q_weights(Scalar alpha, std::size_t n_max) {
    return q_weights(frac_weights<Scalar>(alpha, n_max));
}

/// q(zeta) = g(zeta) / ((1 - zeta/2)^2 (1 - 4 zeta / 9)).
template <typename Scalar = double>
std::complex<Scalar> q_symbol(Scalar alpha, std::complex<Scalar> zeta) {
    const std::complex<Scalar> a = Scalar(1) - zeta / Scalar(2);
    const std::complex<Scalar> b = Scalar(1) - Scalar(4) * zeta / Scalar(9);
    return symbol_eval(alpha, zeta) / (a * a * b);
}

/// v^k = w^k - mu_1 w^{k-1} - mu_2 w^{k-2} - mu_3 w^{k-3}, with w^k = 0 for k <= 0.
/// Input holds w^1..w^m, output holds v^1..v^m.
template <typename Scalar = double>
std::vector<Scalar> multiplier_transform(std::span<const Scalar> w) {
    constexpr MultiplierSet m = multiplier_set();
    std::vector<Scalar> v(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        Scalar acc = w[k];
        for (std::size_t j = 1; j <= 3 && j <= k; ++j) acc -= m.mu[j - 1].template value<Scalar>() * w[k - j];
        v[k] = acc;
    }
    return v;
}

/// Phase contributions of the factors of q(e^{ix}).
struct AngleBudget {
    double theta1;  ///< arg of (1 - z), equals (x - pi)/2
    double theta2;  ///< arg of the quintic cofactor a_6 - i b_6
    double theta3;  ///< arg of (1 - z/2)^{-2}
    double theta4;  ///< arg of (1 - 4z/9)^{-1}
    double delta;   ///< theta3 + theta4
};

AngleBudget angle_budget(double x);

/// Result of sampling Re q(e^{ix}) over x in [0, pi].
struct SymbolCertificate {
    double alpha = 0;
    std::size_t grid_size = 0;
    double min_real_part = 0;
    double argmin_x = 0;
    double max_delta = 0;
    double argmax_x = 0;
    double toeplitz_min = 0;
    bool pass = false;
};

inline constexpr double kPositiveRealTolerance = 1e-12;

SymbolCertificate verify_positive_real(double alpha, std::size_t grid_size,
                                       double tolerance = kPositiveRealTolerance);

/// Cubic p(s) with h(x) = p(cos x).
double toeplitz_poly(double s);
/// Generating function h(x) of the symmetric part of the multiplier Toeplitz matrix.
double toeplitz_symbol(double x);
/// Minimiser s* = (25 - sqrt(145)) / 24 of p on [-1, 1].
double toeplitz_minimizer();
/// min_{s in [-1,1]} p(s), found from the stationary points of the cubic.
double toeplitz_min();

}  // namespace fracsav
