#pragma once

#include <cstddef>
#include <cstdint>

#include "sketchid/cp_tensor.hpp"
#include "sketchid/sparse_matrix.hpp"

namespace sketchid {

/// Sparse I × R test matrix Σ_{i<2K} σ_i u_i v_iᵀ with sparse random unit
/// vectors u_i, v_i. σ decays geometrically from 1 to 1e-8 over the first K
/// terms and stays at 1e-8 for the next K, so σ_{K+1}(A) sits near 1e-8.
///
/// Every vector gets the same expected density √(density / 2K), at least one
/// entry, so the assembled matrix has roughly density·I·R stored entries.
/// Requires 2K ≤ min(I, R) and density·I ≥ 4.
SparseMatrix gen_synthetic_matrix(std::size_t rows, std::size_t cols, std::size_t k, double density,
                                  std::uint64_t seed);

/// Order-N CP tensor with I × R sparse factors whose columns are random unit
/// vectors of the given density. λ_r = 10^(−8r/R) (0-based r) for the first
/// `decay_length` terms, then 1e-8; decay_length = 0 means k.
/// Requires density·I ≥ 1.
CpTensor gen_synthetic_tensor(std::size_t order, std::size_t dim, std::size_t rank, std::size_t k, double density,
                              std::uint64_t seed, std::size_t decay_length = 0);

}  // namespace sketchid
