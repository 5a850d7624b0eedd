#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sketchid/cp_tensor.hpp"
#include "sketchid/linalg.hpp"

namespace sketchid {

enum class TensorIdMethod { tensorsketch, gaussian, gram };

std::string_view to_string(TensorIdMethod m) noexcept;
std::optional<TensorIdMethod> parse_tensor_id_method(std::string_view name) noexcept;

/// Rank-k tensor ID: reduced = Σ_k new_svalues[k]·X⁽ʲᵏ⁾ with
/// new_svalues[k] = λ_{j_k}·Σ_r p(k, r).
struct TensorIdResult {
    CpTensor reduced;
    std::vector<std::size_t> j;
    DenseMatrix p;  // k × R
    std::vector<double> new_svalues;
    TensorIdMethod method = TensorIdMethod::tensorsketch;
    std::size_t sketch_rows = 0;  // L; 0 for the Gram method

    // When the sketch has numerical rank below k, only numerical_rank terms
    // get coefficients; the remaining rows of p and their s-values are zero.
    std::size_t numerical_rank = 0;
    bool rank_deficient = false;
};

/// TensorSketch ID. Requires k <= R and k <= L < Π I_n.
TensorIdResult tensorsketch_id(const CpTensor& x, std::size_t k, std::size_t l, std::uint64_t seed,
                               double rank_tol = kDefaultRankTol);

/// Gaussian Khatri-Rao sketch ID. Requires k <= R and k <= L.
TensorIdResult gaussian_tensor_id(const CpTensor& x, std::size_t k, std::size_t l, std::uint64_t seed,
                                  double rank_tol = kDefaultRankTol);

/// ID computed from the R × R Gram matrix MᵀM. Requires k <= R.
TensorIdResult gram_tensor_id(const CpTensor& x, std::size_t k, double rank_tol = kDefaultRankTol);

/// The L × R sketch of M used by a sketching method (validates k and L).
DenseMatrix tensor_sketch_for_id(TensorIdMethod method, const CpTensor& x, std::size_t k, std::size_t l,
                                 std::uint64_t seed);

/// Second half of the sketching methods: ID of the sketch y and s-value update.
TensorIdResult tensor_id_from_sketch(const CpTensor& x, const DenseMatrix& y, std::size_t k, TensorIdMethod method,
                                     double rank_tol = kDefaultRankTol);

TensorIdResult compute_tensor_id(TensorIdMethod method, const CpTensor& x, std::size_t k, std::size_t l,
                                 std::uint64_t seed, double rank_tol = kDefaultRankTol);

}  // namespace sketchid
