#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchid/any_matrix.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/sketch.hpp"

namespace sketchid {

enum class IdMethod { deterministic, gaussian, srft, countsketch };

std::string_view to_string(IdMethod m) noexcept;
std::optional<IdMethod> parse_id_method(std::string_view name) noexcept;

/// Rank-k interpolative decomposition A ≈ A(:, j)·p.
///
/// The columns of p at positions j form the k × k identity exactly; they are
/// assigned, never solved for.
struct InterpolativeDecomposition {
    DenseMatrix p;               // k × R coefficients
    std::vector<std::size_t> j;  // k distinct selected columns, in pivot order
    std::size_t k = 0;
    IdMethod method = IdMethod::deterministic;
    std::size_t sketch_rows = 0;  // L; 0 for the deterministic method

    // Numerical rank of the (sketched) matrix as seen by the rank-k pivoted QR.
    // Below k means the triangle was regularized and the ID is flagged.
    std::size_t numerical_rank = 0;
    bool rank_deficient = false;

    double max_abs_coefficient() const;
};

/// Deterministic ID from a rank-k column-pivoted QR. Diagonal entries of the
/// leading triangle below rank_tol·|r_00| are floored to that value before the
/// solve and the result is flagged rank deficient.
InterpolativeDecomposition matrix_id(const DenseMatrix& a, std::size_t k, double rank_tol = kDefaultRankTol);

/// Sketch-and-solve IDs. All require k <= L < rows(a) and k <= cols(a); the
/// returned ID references the columns of `a`.
InterpolativeDecomposition countsketch_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                          HashMode mode = HashMode::surjective, double rank_tol = kDefaultRankTol);
InterpolativeDecomposition gaussian_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                       double rank_tol = kDefaultRankTol);
InterpolativeDecomposition srft_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                   double rank_tol = kDefaultRankTol);

/// The L × R sketch a randomized method would decompose. Validates k, L against a.
DenseMatrix sketch_for_id(IdMethod method, const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed);

/// Dispatches on method; `l` is ignored for the deterministic method.
InterpolativeDecomposition compute_id(IdMethod method, const AnyMatrix& a, std::size_t k, std::size_t l,
                                      std::uint64_t seed, double rank_tol = kDefaultRankTol);

/// A(:, j)·p.
DenseMatrix reconstruct(const AnyMatrix& a, const InterpolativeDecomposition& id);

/// √(4k(R−k)+1): the coefficient-norm bound a strong rank-revealing QR guarantees
/// for a rank-k ID of an R-column matrix. Pivoted QR usually, not always, meets it.
double id_norm_bound(std::size_t k, std::size_t r) noexcept;

}  // namespace sketchid
