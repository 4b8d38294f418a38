#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace amil {

// Row-major dense matrix of doubles. Small and unclever on purpose: the
// network layers here are at most a few hundred columns wide.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    double* row(std::size_t r) noexcept { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const noexcept { return data_.data() + r * cols_; }
    std::span<double> row_span(std::size_t r) noexcept { return {row(r), cols_}; }
    std::span<const double> row_span(std::size_t r) const noexcept { return {row(r), cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::size_t size() const noexcept { return data_.size(); }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Accumulating matrix products over raw row-major buffers.
namespace raw {
// c += a * b          with a: [m x k], b: [k x n], c: [m x n]
void add_matmul(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                double* c);
// c += a^T * b        with a: [k x m], b: [k x n], c: [m x n]
void add_matmul_at(const double* a, std::size_t k, std::size_t m, const double* b, std::size_t n,
                   double* c);
// c += a * b^T        with a: [m x k], b: [n x k], c: [m x n]
void add_matmul_bt(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                   double* c);
} // namespace raw

// c += a * b          with a: [m x k], b: [k x n], c: [m x n]
void add_matmul(const Matrix& a, const Matrix& b, Matrix& c);
// c += a^T * b        with a: [k x m], b: [k x n], c: [m x n]
void add_matmul_at(const Matrix& a, const Matrix& b, Matrix& c);
// c += a * b^T        with a: [m x k], b: [n x k], c: [m x n]
void add_matmul_bt(const Matrix& a, const Matrix& b, Matrix& c);

} // namespace amil
