#include "sketchid/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sketchid/errors.hpp"

namespace sketchid {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
    require(data_.size() == rows_ * cols_, "DenseMatrix: data length does not equal rows*cols");
    if (!all_finite()) throw ArgumentError("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> data(m * n);
    std::size_t i = 0;
    for (const auto& row : rows) {
        require(row.size() == n, "DenseMatrix::from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : row) data[j++ * m + i] = v;
        ++i;
    }
    return DenseMatrix(m, n, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> idx) const {
    DenseMatrix out(rows_, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        require(idx[k] < cols_, "select_columns: index out of range");
        std::ranges::copy(col(idx[k]), out.col(k).begin());
    }
    return out;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

bool DenseMatrix::all_finite() const noexcept {
    return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum: shape mismatch");
    DenseMatrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
    return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix difference: shape mismatch");
    DenseMatrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
    return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

double norm2(std::span<const double> x) noexcept {
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double ssq = 0.0;
    for (double v : x) {
        const double t = v / scale;
        ssq += t * t;
    }
    return scale * std::sqrt(ssq);
}

}  // namespace sketchid
