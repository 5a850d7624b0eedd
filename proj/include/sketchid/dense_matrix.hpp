#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sketchid {

/// Column-major matrix of doubles. Constructors reject NaN/Inf.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major);

    /// Row-wise literal, e.g. DenseMatrix::from_rows({{1, 2}, {3, 4}}).
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transpose() const;
    DenseMatrix select_columns(std::span<const std::size_t> idx) const;
    double frobenius_norm() const;
    bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

/// Euclidean norm computed with scaling so it neither overflows nor underflows.
double norm2(std::span<const double> x) noexcept;

}  // namespace sketchid
