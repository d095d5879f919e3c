#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Core>

#include "fracsav/errors.hpp"

namespace fracsav {

/// Cholesky factorisation A = L L^T of a symmetric positive-definite band
/// matrix with `bandwidth` sub-diagonals. The lower band is stored row-wise
/// as bands(d, i) = A(i, i - d).
template <typename Scalar = double>
class BandedCholesky {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Bands = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    BandedCholesky() = default;

    explicit BandedCholesky(const Bands& lower_bands) { compute(lower_bands); }

    void compute(const Bands& lower_bands) {
        const Eigen::Index p = lower_bands.rows() - 1;
        const Eigen::Index n = lower_bands.cols();
        factor_ = lower_bands;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index d = std::min(p, i); d >= 1; --d) {
                const Eigen::Index j = i - d;
                Scalar s = factor_(d, i);
                for (Eigen::Index k = std::max<Eigen::Index>(0, i - p); k < j; ++k)
                    s -= factor_(i - k, i) * factor_(j - k, j);
                factor_(d, i) = s / factor_(0, j);
            }
            Scalar s = factor_(0, i);
            for (Eigen::Index k = std::max<Eigen::Index>(0, i - p); k < i; ++k)
                s -= factor_(i - k, i) * factor_(i - k, i);
            if (!(s > Scalar(0))) throw NumericalError("band matrix is not positive definite");
            factor_(0, i) = std::sqrt(s);
        }
    }

    Eigen::Index size() const { return factor_.cols(); }
    Eigen::Index bandwidth() const { return factor_.rows() - 1; }

    Vector solve(const Vector& b) const {
        const Eigen::Index n = size(), p = bandwidth();
        if (b.size() != n) throw ShapeError("band solve: right-hand side has wrong length");
        Vector y = b;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = std::max<Eigen::Index>(0, i - p); k < i; ++k) y(i) -= factor_(i - k, i) * y(k);
            y(i) /= factor_(0, i);
        }
        for (Eigen::Index i = n; i-- > 0;) {
            for (Eigen::Index k = i + 1; k <= std::min(n - 1, i + p); ++k) y(i) -= factor_(k - i, k) * y(k);
            y(i) /= factor_(0, i);
        }
        return y;
    }

private:
    Bands factor_;
};

/// y = A x for a symmetric band matrix given by its lower bands.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> banded_symmetric_apply(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& lower_bands,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
    const Eigen::Index p = lower_bands.rows() - 1, n = lower_bands.cols();
    if (x.size() != n) throw ShapeError("band apply: vector has wrong length");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = lower_bands.row(0).transpose().cwiseProduct(x);
    for (Eigen::Index d = 1; d <= p; ++d)
        for (Eigen::Index i = d; i < n; ++i) {
            y(i) += lower_bands(d, i) * x(i - d);
            y(i - d) += lower_bands(d, i) * x(i);
        }
    return y;
}

}  // namespace fracsav
