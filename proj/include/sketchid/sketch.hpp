#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchid/any_matrix.hpp"

namespace sketchid {

// Implicit sketching operators. None of them stores its L × I matrix; each
// can materialize itself with to_dense() for verification. Bucket and row
// indices are 0-based throughout.

enum class HashMode {
    standard,    // h(i) iid uniform on [0, L)
    surjective,  // every bucket receives at least one input row; the operator has full rank L
};

/// CountSketch S = Φ·D: row i of the input is multiplied by sign[i] and added to output row bucket[i].
class CountSketchOp {
public:
    /// Draws a fresh operator. Surjective mode requires out_dim <= in_dim.
    CountSketchOp(std::size_t in_dim, std::size_t out_dim, HashMode mode, std::uint64_t seed);

    /// Operator with explicitly given hash and signs (signs must be ±1).
    CountSketchOp(std::size_t out_dim, std::vector<std::uint32_t> bucket, std::vector<double> sign);

    std::size_t in_dim() const noexcept { return bucket_.size(); }
    std::size_t out_dim() const noexcept { return out_dim_; }
    HashMode mode() const noexcept { return mode_; }
    std::span<const std::uint32_t> bucket() const noexcept { return bucket_; }
    std::span<const double> sign() const noexcept { return sign_; }

    DenseMatrix to_dense() const;

private:
    std::size_t out_dim_ = 0;
    HashMode mode_ = HashMode::standard;
    std::vector<std::uint32_t> bucket_;
    std::vector<double> sign_;
};

DenseMatrix apply_countsketch(const CountSketchOp& s, const SparseMatrix& a);
DenseMatrix apply_countsketch(const CountSketchOp& s, const DenseMatrix& a);
DenseMatrix apply_countsketch(const CountSketchOp& s, const AnyMatrix& a);

/// TensorSketch over index tuples (i_0, …, i_{N-1}); one independent
/// standard-mode CountSketch per mode.
///
/// Composite hash H = (Σ_n h_n(i_n)) mod L and sign S = Π_n s_n(i_n).
/// Linear row indices follow the column-major (first index fastest) convention,
/// matching CP tensor vectorization.
class TensorSketchOp {
public:
    TensorSketchOp(std::vector<std::size_t> mode_dims, std::size_t out_dim, std::uint64_t seed);
    explicit TensorSketchOp(std::vector<CountSketchOp> modes);

    std::size_t order() const noexcept { return modes_.size(); }
    std::size_t out_dim() const noexcept { return out_dim_; }
    std::span<const CountSketchOp> modes() const noexcept { return modes_; }
    std::vector<std::size_t> mode_dims() const;

    std::size_t hash(std::span<const std::size_t> index) const;
    double sign(std::span<const std::size_t> index) const;

    /// L × Π I_n matrix; only sensible for small operators.
    DenseMatrix to_dense() const;

private:
    std::size_t out_dim_ = 0;
    std::vector<CountSketchOp> modes_;
};

/// T·(⊙_n A⁽ⁿ⁾)·diag(λ) via per-mode CountSketch, length-L FFTs and their
/// Hadamard product. Cost O(Σ nnz(A⁽ⁿ⁾) + N·R·L log L).
DenseMatrix apply_tensorsketch(const TensorSketchOp& t, std::span<const AnyMatrix> factors,
                               std::span<const double> scale);

/// Subsampled randomized Fourier transform Y = S_sub·F·D·A.
///
/// F is the real form of the length-I DFT, rows interleaved as
///   row 0           Re c_0                         (DC, all ones)
///   row 2k-1, 2k    √2·Re c_k, √2·Im c_k           for 1 ≤ k < I/2
///   row I-1         Re c_{I/2}                     (I even only)
/// where c_k = Σ_i x_i e^{-2πi·ik/I}. F has orthogonal rows of norm √I.
class SrftOp {
public:
    SrftOp(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);
    SrftOp(std::vector<double> sign, std::vector<std::size_t> sample_rows);

    std::size_t in_dim() const noexcept { return sign_.size(); }
    std::size_t out_dim() const noexcept { return sample_rows_.size(); }
    std::span<const double> sign() const noexcept { return sign_; }
    std::span<const std::size_t> sample_rows() const noexcept { return sample_rows_; }

    DenseMatrix to_dense() const;

private:
    std::vector<double> sign_;
    std::vector<std::size_t> sample_rows_;
};

/// Sparse inputs are densified at most kSrftColumnBlock columns at a time.
inline constexpr std::size_t kSrftColumnBlock = 1024;

DenseMatrix apply_srft(const SrftOp& s, const DenseMatrix& a);
DenseMatrix apply_srft(const SrftOp& s, const SparseMatrix& a);
DenseMatrix apply_srft(const SrftOp& s, const AnyMatrix& a);

/// L × I matrix of iid standard normals, generated on demand from a
/// counter-based stream: column i depends only on (seed, i). Replay is exact
/// within one build; libm differences may change the last bits elsewhere.
class GaussianOp {
public:
    GaussianOp(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

    std::size_t in_dim() const noexcept { return in_dim_; }
    std::size_t out_dim() const noexcept { return out_dim_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Column i of the operator (length out_dim).
    void column(std::size_t i, std::span<double> out) const;
    DenseMatrix to_dense() const;

private:
    std::size_t in_dim_;
    std::size_t out_dim_;
    std::uint64_t seed_;
    std::uint64_t key_;
};

/// Only operator columns that meet a stored entry are generated for sparse input.
DenseMatrix apply_gaussian(const GaussianOp& g, const SparseMatrix& a);
DenseMatrix apply_gaussian(const GaussianOp& g, const DenseMatrix& a);
DenseMatrix apply_gaussian(const GaussianOp& g, const AnyMatrix& a);

/// y_lr = λ_r Π_n ⟨ω⁽ⁿ⁾_l, a⁽ⁿ⁾_r⟩ where ω⁽ⁿ⁾_l is row l of ops[n]; neither the
/// Khatri-Rao operator nor the Khatri-Rao product is formed.
DenseMatrix apply_gaussian_kr(std::span<const GaussianOp> ops, std::span<const AnyMatrix> factors,
                              std::span<const double> scale);

/// Per-mode Gaussian operators drawn from independent substreams of `seed`.
std::vector<GaussianOp> gaussian_kr_ops(std::span<const std::size_t> mode_dims, std::size_t out_dim,
                                        std::uint64_t seed);

}  // namespace sketchid
