#pragma once

#include <cstddef>
#include <variant>

#include "sketchid/dense_matrix.hpp"
#include "sketchid/sparse_matrix.hpp"

namespace sketchid {

/// Operand that may be stored densely or in CSC form.
using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

inline std::size_t rows_of(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return m.rows(); }, a);
}
inline std::size_t cols_of(const AnyMatrix& a) {
    return std::visit([](const auto& m) { return m.cols(); }, a);
}
inline DenseMatrix to_dense(const AnyMatrix& a) {
    if (const auto* s = std::get_if<SparseMatrix>(&a)) return s->to_dense();
    return std::get<DenseMatrix>(a);
}
std::size_t nnz_of(const AnyMatrix& a);

}  // namespace sketchid
