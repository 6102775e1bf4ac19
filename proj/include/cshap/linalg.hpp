#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cshap::linalg {

// Dense row-major matrix; just enough for the normal-equation solves here.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// XᵀX + diag(penalty).
Matrix penalized_gram(const Matrix& x, std::span<const double> penalty);

// Xᵀy.
std::vector<double> transpose_times(const Matrix& x, std::span<const double> y);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
class Cholesky {
public:
    // Returns nullopt when a pivot is not safely positive.
    static std::optional<Cholesky> factor(const Matrix& spd);

    std::vector<double> solve(std::span<const double> rhs) const;
    std::size_t size() const noexcept { return lower_.rows(); }

private:
    explicit Cholesky(Matrix lower) : lower_(std::move(lower)) {}
    Matrix lower_;
};

} // namespace cshap::linalg
