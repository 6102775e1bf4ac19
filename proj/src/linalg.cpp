#include "cshap/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cshap/error.hpp"

namespace cshap::linalg {

Matrix penalized_gram(const Matrix& x, std::span<const double> penalty) {
    if (penalty.size() != x.cols()) {
        throw Error(ErrorCode::LengthMismatch, "penalty length must match column count");
    }
    const auto p = x.cols();
    Matrix g(p, p);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        for (std::size_t i = 0; i < p; ++i) {
            const double xi = row[i];
            for (std::size_t j = 0; j <= i; ++j) g(i, j) += xi * row[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        g(i, i) += penalty[i];
        for (std::size_t j = 0; j < i; ++j) g(j, i) = g(i, j);
    }
    return g;
}

std::vector<double> transpose_times(const Matrix& x, std::span<const double> y) {
    if (y.size() != x.rows()) {
        throw Error(ErrorCode::LengthMismatch, "vector length must match row count");
    }
    std::vector<double> out(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        const double yr = y[r];
        for (std::size_t c = 0; c < x.cols(); ++c) out[c] += row[c] * yr;
    }
    return out;
}

std::optional<Cholesky> Cholesky::factor(const Matrix& spd) {
    const auto n = spd.rows();
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(spd(i, i)));
    // Pivots below this are treated as rank deficiency rather than rounding.
    const double tiny = scale * 1e-13;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = spd(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > tiny)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return Cholesky(std::move(l));
}

std::vector<double> Cholesky::solve(std::span<const double> rhs) const {
    const auto n = lower_.rows();
    if (rhs.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "right-hand side length must match system size");
    }
    std::vector<double> y(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * y[k];
        y[i] = s / lower_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * y[k];
        y[ii] = s / lower_(ii, ii);
    }
    return y;
}

} // namespace cshap::linalg
