#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sketchid/dense_matrix.hpp"
#include "sketchid/sparse_matrix.hpp"

namespace sketchid {

inline constexpr double kDefaultRankTol = 1e-12;

// Products. All throw ArgumentError on inner-dimension mismatch.
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);  // aᵀ·b
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b);  // aᵀ·b

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> y);
std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
std::vector<double> matvec_t(const SparseMatrix& a, std::span<const double> y);

/// aᵀa, exploiting sparsity (only columns with overlapping rows contribute).
DenseMatrix gram(const SparseMatrix& a);
DenseMatrix gram(const DenseMatrix& a);

/// Solves r·x = b for upper-triangular r (only the upper triangle of r is read).
/// Throws SingularError naming the first zero diagonal entry.
DenseMatrix triangular_solve(const DenseMatrix& r, const DenseMatrix& b);

/// Householder QR, optionally column pivoted, truncated after k steps.
struct PivotedQr {
    DenseMatrix q;               // rows × k, orthonormal columns
    DenseMatrix r;               // k × cols, upper trapezoidal, columns in pivoted order
    std::vector<std::size_t> perm;  // perm[i] = original index of pivoted column i
    std::size_t numerical_rank = 0;
};

/// Rank-k column-pivoted QR: a(:, perm) ≈ q·r with |r_00| ≥ |r_11| ≥ … .
/// Pivot ties go to the lowest original column index. numerical_rank counts
/// leading diagonal entries with |r_ii| > rank_tol·|r_00|.
PivotedQr cpqr(const DenseMatrix& a, std::size_t k, double rank_tol = kDefaultRankTol);

/// Unpivoted economy QR truncated after k steps (perm is the identity).
PivotedQr householder_qr(const DenseMatrix& a, std::size_t k, double rank_tol = kDefaultRankTol);

/// Full singular spectrum, nonincreasing, length min(rows, cols).
std::vector<double> svd_values(const DenseMatrix& a);

}  // namespace sketchid
