#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sketchid/any_matrix.hpp"
#include "sketchid/matrix_id.hpp"

namespace sketchid {

/// Matrix-free linear map x ↦ Bx.
using LinearMap = std::function<std::vector<double>(std::span<const double>)>;

struct NormEstimate {
    double value = 0.0;  // never above the true spectral norm, up to round-off
    std::size_t iterations = 0;
    std::size_t probes = 0;
};

inline constexpr std::size_t kDefaultNormIterations = 10;
inline constexpr std::size_t kDefaultNormProbes = 2;

/// Power iteration on BᵀB from `probes` Gaussian starts; returns the largest
/// ‖Bv‖/‖v‖ over the final iterates. The iterate is renormalized every step.
///
/// Before iterating, ⟨Bx, y⟩ = ⟨x, Bᵀy⟩ is checked on random vectors to 1e-10
/// relative; a mismatched pair throws ArgumentError. When B is a difference of
/// larger operators (an ID residual), pass a bound on their norms as
/// `term_scale` so the check tolerates the cancellation round-off.
NormEstimate est_spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, std::size_t cols,
                               std::size_t iters = kDefaultNormIterations, std::size_t probes = kDefaultNormProbes,
                               std::uint64_t seed = 0, double term_scale = 0.0);

/// The residual x ↦ A(:, j)(Px) − Ax of an ID and its adjoint. Holds references
/// to `a` and `id`, which must outlive the maps.
struct ResidualOperator {
    LinearMap apply;
    LinearMap apply_adjoint;
    std::size_t rows = 0;
    std::size_t cols = 0;
    double term_scale = 0.0;  // ‖A‖_F + ‖A(:, j)‖_F·‖P‖_F
};

ResidualOperator id_residual(const AnyMatrix& a, const InterpolativeDecomposition& id);

/// Estimate of ‖A − A(:, j)P‖₂ without forming the residual.
NormEstimate estimate_id_error(const AnyMatrix& a, const InterpolativeDecomposition& id,
                               std::size_t iters = kDefaultNormIterations, std::size_t probes = kDefaultNormProbes,
                               std::uint64_t seed = 0);

}  // namespace sketchid
