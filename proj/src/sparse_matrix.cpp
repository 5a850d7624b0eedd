#include "sketchid/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sketchid/any_matrix.hpp"
#include "sketchid/errors.hpp"

namespace sketchid {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
                           std::vector<std::size_t> row_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
    validate_and_prune();
}

void SparseMatrix::validate_and_prune() {
    require(col_ptr_.size() == cols_ + 1, "SparseMatrix: col_ptr must have cols+1 entries");
    require(col_ptr_.front() == 0, "SparseMatrix: col_ptr[0] must be 0");
    require(row_idx_.size() == values_.size(), "SparseMatrix: row_idx and values differ in length");
    require(col_ptr_.back() == values_.size(), "SparseMatrix: col_ptr[cols] must equal nnz");
    for (std::size_t j = 0; j < cols_; ++j) {
        require(col_ptr_[j] <= col_ptr_[j + 1], "SparseMatrix: col_ptr must be nondecreasing");
        for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
            require(row_idx_[p] < rows_, "SparseMatrix: row index out of range");
            require(p == col_ptr_[j] || row_idx_[p - 1] < row_idx_[p],
                    "SparseMatrix: row indices must be strictly increasing within a column");
            if (!std::isfinite(values_[p])) throw ArgumentError("SparseMatrix: non-finite entry");
        }
    }
    if (std::ranges::find(values_, 0.0) == values_.end()) return;

    std::size_t out = 0;
    std::size_t start = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
        const std::size_t end = col_ptr_[j + 1];
        for (std::size_t p = start; p < end; ++p) {
            if (values_[p] == 0.0) continue;
            row_idx_[out] = row_idx_[p];
            values_[out] = values_[p];
            ++out;
        }
        start = end;
        col_ptr_[j + 1] = out;
    }
    row_idx_.resize(out);
    values_.resize(out);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) require(t.row < rows && t.col < cols, "from_triplets: index out of range");
    std::ranges::sort(triplets, [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    std::vector<std::size_t> col_ptr(cols + 1, 0);
    std::vector<std::size_t> row_idx;
    std::vector<double> values;
    row_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (std::size_t p = 0; p < triplets.size();) {
        const auto [r, c, v0] = triplets[p];
        double v = v0;
        std::size_t q = p + 1;
        while (q < triplets.size() && triplets[q].row == r && triplets[q].col == c) v += triplets[q++].value;
        if (v != 0.0) {
            row_idx.push_back(r);
            values.push_back(v);
            ++col_ptr[c + 1];
        }
        p = q;
    }
    for (std::size_t j = 0; j < cols; ++j) col_ptr[j + 1] += col_ptr[j];
    return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a) {
    std::vector<std::size_t> col_ptr(a.cols() + 1, 0);
    std::vector<std::size_t> row_idx;
    std::vector<double> values;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (a(i, j) != 0.0) {
                row_idx.push_back(i);
                values.push_back(a(i, j));
            }
        }
        col_ptr[j + 1] = values.size();
    }
    return SparseMatrix(a.rows(), a.cols(), std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> col_ptr(n + 1);
    std::vector<std::size_t> row_idx(n);
    for (std::size_t j = 0; j <= n; ++j) col_ptr[j] = j;
    for (std::size_t j = 0; j < n; ++j) row_idx[j] = j;
    return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx), std::vector<double>(n, 1.0));
}

DenseMatrix SparseMatrix::to_dense() const { return to_dense_columns(0, cols_); }

DenseMatrix SparseMatrix::to_dense_columns(std::size_t first, std::size_t count) const {
    require(first + count <= cols_, "to_dense_columns: range out of bounds");
    DenseMatrix out(rows_, count);
    for (std::size_t j = 0; j < count; ++j) {
        auto rows = col_rows(first + j);
        auto vals = col_values(first + j);
        for (std::size_t p = 0; p < rows.size(); ++p) out(rows[p], j) = vals[p];
    }
    return out;
}

SparseMatrix SparseMatrix::select_columns(std::span<const std::size_t> idx) const {
    std::vector<std::size_t> col_ptr(idx.size() + 1, 0);
    std::vector<std::size_t> row_idx;
    std::vector<double> values;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        require(idx[k] < cols_, "select_columns: index out of range");
        auto r = col_rows(idx[k]);
        auto v = col_values(idx[k]);
        row_idx.insert(row_idx.end(), r.begin(), r.end());
        values.insert(values.end(), v.begin(), v.end());
        col_ptr[k + 1] = values.size();
    }
    return SparseMatrix(rows_, idx.size(), std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<std::size_t> col_ptr(rows_ + 1, 0);
    for (std::size_t r : row_idx_) ++col_ptr[r + 1];
    for (std::size_t i = 0; i < rows_; ++i) col_ptr[i + 1] += col_ptr[i];
    std::vector<std::size_t> next(col_ptr.begin(), col_ptr.end() - 1);
    std::vector<std::size_t> row_idx(nnz());
    std::vector<double> values(nnz());
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
            const std::size_t dst = next[row_idx_[p]]++;
            row_idx[dst] = j;
            values[dst] = values_[p];
        }
    }
    return SparseMatrix(cols_, rows_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

SparseMatrix SparseMatrix::scale_columns(std::span<const double> s) const {
    require(s.size() == cols_, "scale_columns: scale length must equal cols");
    std::vector<double> values = values_;
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) values[p] *= s[j];
    return SparseMatrix(rows_, cols_, col_ptr_, row_idx_, std::move(values));
}

std::vector<std::size_t> SparseMatrix::nonzero_rows() const {
    std::vector<char> seen(rows_, 0);
    for (std::size_t r : row_idx_) seen[r] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows_; ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

std::size_t nnz_of(const AnyMatrix& a) {
    if (const auto* s = std::get_if<SparseMatrix>(&a)) return s->nnz();
    const auto& d = std::get<DenseMatrix>(a);
    return static_cast<std::size_t>(std::ranges::count_if(d.data(), [](double v) { return v != 0.0; }));
}

}  // namespace sketchid
