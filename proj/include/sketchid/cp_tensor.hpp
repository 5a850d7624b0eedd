#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "sketchid/any_matrix.hpp"

namespace sketchid {

/// CP-format tensor Σ_r λ_r a⁽¹⁾_r ∘ … ∘ a⁽ᴺ⁾_r with unit-norm factor columns.
///
/// The normalizing constructor divides every factor column by its 2-norm and
/// folds the norms (and any negative sign of λ_r, via the first factor) into
/// the s-values, so λ ≥ 0 afterwards. A zero column makes its term vanish: λ_r
/// becomes 0, the column is replaced by e_0 and the term is listed in
/// zero_terms().
class CpTensor {
public:
    CpTensor() = default;
    CpTensor(std::vector<double> svalues, std::vector<AnyMatrix> factors);

    /// Skips rescaling; columns must already have unit norm (checked to 1e-10).
    /// s-values are taken as given and may be negative.
    static CpTensor from_unit_factors(std::vector<double> svalues, std::vector<AnyMatrix> factors);

    std::size_t order() const noexcept { return factors_.size(); }
    std::size_t rank() const noexcept { return svalues_.size(); }
    std::vector<std::size_t> mode_dims() const;
    /// Π_n I_n, saturating at SIZE_MAX.
    std::size_t total_size() const noexcept;

    std::span<const double> svalues() const noexcept { return svalues_; }
    std::span<const AnyMatrix> factors() const noexcept { return factors_; }
    const AnyMatrix& factor(std::size_t n) const { return factors_.at(n); }
    std::span<const std::size_t> zero_terms() const noexcept { return zero_terms_; }

    /// Terms `idx` with the given s-values; factor columns are copied verbatim.
    CpTensor select_terms(std::span<const std::size_t> idx, std::vector<double> svalues) const;

private:
    static void validate_shapes(std::span<const double> svalues, std::span<const AnyMatrix> factors);

    std::vector<double> svalues_;
    std::vector<AnyMatrix> factors_;
    std::vector<std::size_t> zero_terms_;
};

/// Hadamard product of the factor Gram matrices, without s-values.
DenseMatrix factor_gram_hadamard(std::span<const AnyMatrix> factors);

/// MᵀM = diag(λ)·(⊛_n A⁽ⁿ⁾ᵀA⁽ⁿ⁾)·diag(λ) for M = (⊙_n A⁽ⁿ⁾)·diag(λ).
DenseMatrix gram_hadamard(const CpTensor& x);

/// Exact Frobenius norm via the Gram identity: √max(0, λᵀ(⊛_n A⁽ⁿ⁾ᵀA⁽ⁿ⁾)λ).
double cp_norm(const CpTensor& x);

/// ‖x − y‖_F. The terms of y are appended to x with negated s-values; a term of
/// y whose factor columns are bitwise identical to a term of x is merged into
/// it first, so the difference of shared terms is formed on the s-values rather
/// than cancelling inside the quadratic form.
double cp_diff_norm(const CpTensor& x, const CpTensor& y);

namespace cpio {

// On-disk layout: <dir>/meta.json {"N", "R", "dims"}, <dir>/svalues.txt (one
// value per line, 17 significant digits), <dir>/factor_1.mtx … factor_N.mtx.
// Sparse factors are written in coordinate format, dense ones in array format.
// Reading renormalizes the columns.

void write(const std::filesystem::path& dir, const CpTensor& x);
CpTensor read(const std::filesystem::path& dir);

}  // namespace cpio

}  // namespace sketchid
