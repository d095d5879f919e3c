#include "fracsav/multiplier_analysis.hpp"

#include <limits>
#include <numbers>

namespace fracsav {

AngleBudget angle_budget(double x) {
    if (!(x > 0.0 && x < std::numbers::pi))
        throw ParameterError("angle_budget needs x in (0, pi)");

    const double c1 = std::cos(x), s1 = std::sin(x);
    AngleBudget b{};
    b.theta1 = std::atan(-s1 / (1.0 - c1));

    const double a6 = (147.0 - 213.0 * c1 + 237.0 * std::cos(2 * x) - 163.0 * std::cos(3 * x) +
                       62.0 * std::cos(4 * x) - 10.0 * std::cos(5 * x)) /
                      60.0;
    const double b6 = (213.0 * s1 - 237.0 * std::sin(2 * x) + 163.0 * std::sin(3 * x) -
                       62.0 * std::sin(4 * x) + 10.0 * std::sin(5 * x)) /
                      60.0;
    if (a6 > 0.0)
        b.theta2 = std::atan(-b6 / a6);
    else if (a6 < 0.0)
        b.theta2 = std::atan(-b6 / a6) - std::numbers::pi;
    else
        b.theta2 = -std::numbers::pi / 2;  // limit of the a6 < 0 branch

    b.theta3 = 2.0 * std::atan(0.5 * s1 / (1.0 - 0.5 * c1));
    b.theta4 = std::atan((4.0 / 9.0) * s1 / (1.0 - (4.0 / 9.0) * c1));
    b.delta = b.theta3 + b.theta4;
    return b;
}

SymbolCertificate verify_positive_real(double alpha, std::size_t grid_size, double tolerance) {
    detail::check_alpha(alpha);
    if (grid_size < 1024) throw ParameterError("symbol grid needs at least 1024 points");

    SymbolCertificate cert;
    cert.alpha = alpha;
    cert.grid_size = grid_size;
    cert.min_real_part = std::numeric_limits<double>::infinity();
    cert.max_delta = -std::numeric_limits<double>::infinity();

    const double h = std::numbers::pi / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = (i + 1 == grid_size) ? std::numbers::pi : h * static_cast<double>(i);
        const double re = q_symbol(alpha, std::polar(1.0, x)).real();
        if (re < cert.min_real_part) {
            cert.min_real_part = re;
            cert.argmin_x = x;
        }
        if (i == 0 || i + 1 == grid_size) continue;
        const double delta = angle_budget(x).delta;
        if (delta > cert.max_delta) {
            cert.max_delta = delta;
            cert.argmax_x = x;
        }
    }
    cert.toeplitz_min = toeplitz_min();
    cert.pass = cert.min_real_part >= -tolerance;
    return cert;
}

double toeplitz_poly(double s) {
    return ((-4.0 / 9.0 * s + 25.0 / 18.0) * s - 10.0 / 9.0) * s + 79.0 / 288.0;
}

double toeplitz_symbol(double x) {
    return 31.0 / 32.0 - 13.0 / 9.0 * std::cos(x) + 25.0 / 36.0 * std::cos(2 * x) -
           1.0 / 9.0 * std::cos(3 * x);
}

double toeplitz_minimizer() { return (25.0 - std::sqrt(145.0)) / 24.0; }

double toeplitz_min() {
    // p'(s) = 0  <=>  12 s^2 - 25 s + 10 = 0
    const double root = std::sqrt(145.0);
    double best = std::min(toeplitz_poly(-1.0), toeplitz_poly(1.0));
    for (double s : {(25.0 - root) / 24.0, (25.0 + root) / 24.0})
        if (s >= -1.0 && s <= 1.0) best = std::min(best, toeplitz_poly(s));
    return best;
}

}  // namespace fracsav
