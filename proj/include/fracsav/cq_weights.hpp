#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracsav/errors.hpp"

namespace fracsav {

/// Exact rational number with a positive denominator, kept in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

    template <typename Scalar = double>
    constexpr Scalar value() const {
        return static_cast<Scalar>(num) / static_cast<Scalar>(den);
    }

    friend constexpr Rational operator+(Rational a, Rational b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend constexpr Rational operator-(Rational a, Rational b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    friend constexpr Rational operator*(Rational a, Rational b) {
        return {a.num * b.num, a.den * b.den};
    }
    friend constexpr bool operator==(Rational a, Rational b) = default;

private:
    constexpr void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
};

/// The BDF6 generating polynomial sum_{j=1}^{6} (1/j)(1 - zeta)^j expanded in
/// powers of zeta.
struct Bdf6Symbol {
    static constexpr std::size_t degree = 6;
    std::array<Rational, degree + 1> coeffs;

    /// Exact evaluation at a rational point.
    constexpr Rational operator()(Rational zeta) const {
        Rational acc = coeffs[degree];
        for (std::size_t k = degree; k-- > 0;) acc = acc * zeta + coeffs[k];
        return acc;
    }

    /// Horner evaluation in floating point (real or complex argument).
    template <typename T>
    T evaluate(T zeta) const {
        T acc = T(coeffs[degree].value());
        for (std::size_t k = degree; k-- > 0;) acc = acc * zeta + T(coeffs[k].value());
        return acc;
    }
};

constexpr Bdf6Symbol bdf6_symbol() {
    return Bdf6Symbol{{Rational(49, 20), Rational(-6), Rational(15, 2), Rational(-20, 3),
                       Rational(15, 4), Rational(-6, 5), Rational(1, 6)}};
}

/// Convolution-quadrature weights g_0..g_{n_max} of the fractional BDF6 symbol
/// (sum c_k zeta^k)^alpha.
template <typename Scalar = double>
struct CQWeights {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Scalar alpha{};
    Vector g;

    std::size_t n_max() const { return static_cast<std::size_t>(g.size()) - 1; }
    Scalar operator[](std::size_t j) const { return g(static_cast<Eigen::Index>(j)); }
};

namespace detail {

template <typename Scalar>
void check_alpha(Scalar alpha) {
    if (!(alpha > Scalar(0) && alpha <= Scalar(1)))
        throw ParameterError("alpha must lie in (0, 1], got " +
                             std::to_string(static_cast<double>(alpha)));
}

}  // namespace detail

/// Taylor coefficients of (sum c_k zeta^k)^alpha via the power-of-a-series
/// recurrence  n c_0 g_n = sum_{k=1}^{min(n,6)} (k(alpha+1) - n) c_k g_{n-k}.
template <typename Scalar = double>
CQWeights<Scalar> frac_weights(Scalar alpha, std::size_t n_max) {
    detail::check_alpha(alpha);
    constexpr Bdf6Symbol symbol = bdf6_symbol();
    std::array<Scalar, Bdf6Symbol::degree + 1> c{};
    for (std::size_t k = 0; k <= Bdf6Symbol::degree; ++k) c[k] = symbol.coeffs[k].template value<Scalar>();

    CQWeights<Scalar> w;
    w.alpha = alpha;
    w.g.resize(static_cast<Eigen::Index>(n_max + 1));
    w.g(0) = std::pow(c[0], alpha);
    for (std::size_t n = 1; n <= n_max; ++n) {
        Scalar acc(0);
        const std::size_t kmax = std::min<std::size_t>(n, Bdf6Symbol::degree);
        for (std::size_t k = 1; k <= kmax; ++k) {
            const Scalar factor = Scalar(k) * (alpha + Scalar(1)) - Scalar(n);
            acc += factor * c[k] * w.g(static_cast<Eigen::Index>(n - k));
        }
        w.g(static_cast<Eigen::Index>(n)) = acc / (Scalar(n) * c[0]);
    }
    return w;
}

/// Principal-branch value of (sum c_k zeta^k)^alpha for |zeta| <= 1.
/// Returns exactly 0 at zeta = 1.
template <typename Scalar = double>
std::complex<Scalar> symbol_eval(Scalar alpha, std::complex<Scalar> zeta) {
    if (zeta == std::complex<Scalar>(1, 0)) return {0, 0};
    const std::complex<Scalar> base = bdf6_symbol().evaluate(zeta);
    return std::pow(base, alpha);
}

/// Tail of the quadrature sum, sum_{j=1}^{n} g_j phi^{n-j}. The g_0 term acts
/// on the unknown level and is left to the caller.
///
/// V must support `Scalar * V`, `V += V` and `size()`; Field and Eigen vectors
/// both qualify. Only phi^0..phi^{n-1} are read, so the history may stop
/// short of the level being computed.
template <typename Scalar, typename V>
V history_convolution(const CQWeights<Scalar>& w, std::span<const V> history, std::size_t n) {
    if (history.size() < std::max<std::size_t>(n, 1))
        throw ShapeError("history holds " + std::to_string(history.size()) +
                         " levels, need " + std::to_string(std::max<std::size_t>(n, 1)));
    if (n > w.n_max())
        throw ShapeError("weights precomputed to " + std::to_string(w.n_max()) +
                         ", requested level " + std::to_string(n));
    V acc = Scalar(0) * history[0];
    for (std::size_t j = 1; j <= n; ++j) {
        const V& level = history[n - j];
        if (level.size() != acc.size()) throw ShapeError("history levels differ in size");
        acc += w[j] * level;
    }
    return acc;
}

}  // namespace fracsav
