#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sketchid/dense_matrix.hpp"

namespace sketchid {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse column matrix.
///
/// Invariants (checked by every constructor): col_ptr has cols+1 nondecreasing
/// entries starting at 0 and ending at nnz, row indices are strictly increasing
/// inside a column and below rows, every stored value is finite and nonzero.
class SparseMatrix {
public:
    SparseMatrix() : col_ptr_(1, 0) {}
    SparseMatrix(std::size_t rows, std::size_t cols);  // empty (all zeros)

    /// Takes ownership of validated CSC arrays. Explicit zeros are pruned.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> col_ptr,
                 std::vector<std::size_t> row_idx, std::vector<double> values);

    /// Duplicates are summed; entries that sum to zero are dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
    static SparseMatrix from_dense(const DenseMatrix& a);
    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
    std::span<const std::size_t> row_idx() const noexcept { return row_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<const std::size_t> col_rows(std::size_t j) const noexcept {
        return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
    }
    std::span<const double> col_values(std::size_t j) const noexcept {
        return {values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
    }

    DenseMatrix to_dense() const;
    DenseMatrix to_dense_columns(std::size_t first, std::size_t count) const;
    SparseMatrix select_columns(std::span<const std::size_t> idx) const;
    SparseMatrix transpose() const;
    double frobenius_norm() const;

    /// Returns a copy with column j multiplied by s[j]; zero scales drop the column's entries.
    SparseMatrix scale_columns(std::span<const double> s) const;

    /// Rows holding at least one stored entry, ascending.
    std::vector<std::size_t> nonzero_rows() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    void validate_and_prune();

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::size_t> row_idx_;
    std::vector<double> values_;
};

}  // namespace sketchid
