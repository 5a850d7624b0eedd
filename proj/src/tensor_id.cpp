#include "sketchid/tensor_id.hpp"

#include <algorithm>
#include <cmath>

#include "sketchid/errors.hpp"
#include "sketchid/matrix_id.hpp"
#include "sketchid/sketch.hpp"

namespace sketchid {

std::string_view to_string(TensorIdMethod m) noexcept {
    switch (m) {
        case TensorIdMethod::tensorsketch: return "tensorsketch";
        case TensorIdMethod::gaussian: return "gaussian";
        case TensorIdMethod::gram: return "gram";
    }
    return "unknown";
}

std::optional<TensorIdMethod> parse_tensor_id_method(std::string_view name) noexcept {
    for (auto m : {TensorIdMethod::tensorsketch, TensorIdMethod::gaussian, TensorIdMethod::gram})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

namespace {

void check_rank(const CpTensor& x, std::size_t k) {
    require(x.order() >= 1, "tensor ID: empty tensor");
    require(k >= 1 && k <= x.rank(), "tensor ID: target rank must satisfy 1 <= k <= R");
}

void assemble(const CpTensor& x, TensorIdResult& out) {
    const auto lam = x.svalues();
    out.new_svalues.assign(out.j.size(), 0.0);
    for (std::size_t i = 0; i < out.j.size(); ++i) {
        double row_sum = 0.0;
        for (std::size_t r = 0; r < out.p.cols(); ++r) row_sum += out.p(i, r);
        out.new_svalues[i] = lam[out.j[i]] * row_sum;
    }
    out.reduced = x.select_terms(out.j, out.new_svalues);
}

}  // namespace

DenseMatrix tensor_sketch_for_id(TensorIdMethod method, const CpTensor& x, std::size_t k, std::size_t l,
                                 std::uint64_t seed) {
    check_rank(x, k);
    require(k <= l, "tensor ID: sketch dimension L must be at least k");
    const auto dims = x.mode_dims();
    switch (method) {
        case TensorIdMethod::tensorsketch:
            require(l < x.total_size(), "tensor ID: sketch dimension L must be below the number of tensor entries");
            return apply_tensorsketch(TensorSketchOp(dims, l, seed), x.factors(), x.svalues());
        case TensorIdMethod::gaussian: {
            const auto ops = gaussian_kr_ops(dims, l, seed);
            return apply_gaussian_kr(ops, x.factors(), x.svalues());
        }
        case TensorIdMethod::gram: break;
    }
    throw ArgumentError("tensor_sketch_for_id: the Gram method does not sketch");
}

TensorIdResult tensor_id_from_sketch(const CpTensor& x, const DenseMatrix& y, std::size_t k, TensorIdMethod method,
                                     double rank_tol) {
    check_rank(x, k);
    require(y.cols() == x.rank(), "tensor ID: sketch column count differs from the CP rank");
    require(k <= y.rows(), "tensor ID: sketch has fewer than k rows");

    InterpolativeDecomposition id = matrix_id(y, k, rank_tol);
    TensorIdResult out;
    out.method = method;
    out.sketch_rows = y.rows();
    out.j = id.j;
    out.numerical_rank = id.numerical_rank;
    out.rank_deficient = id.rank_deficient;
    if (!id.rank_deficient) {
        out.p = std::move(id.p);
    } else {
        // Repeated or vanishing terms: interpolate with the numerically
        // independent pivots only and give the rest zero weight. The pivots of a
        // rank-r pivoted QR are the first r pivots of the rank-k one.
        out.p = DenseMatrix(k, x.rank());
        const std::size_t r = id.numerical_rank;
        if (r > 0) {
            const InterpolativeDecomposition head = matrix_id(y, r, rank_tol);
            for (std::size_t c = 0; c < x.rank(); ++c)
                for (std::size_t i = 0; i < r; ++i) out.p(i, c) = head.p(i, c);
        }
    }
    assemble(x, out);
    return out;
}

TensorIdResult tensorsketch_id(const CpTensor& x, std::size_t k, std::size_t l, std::uint64_t seed,
                               double rank_tol) {
    return tensor_id_from_sketch(x, tensor_sketch_for_id(TensorIdMethod::tensorsketch, x, k, l, seed), k,
                                 TensorIdMethod::tensorsketch, rank_tol);
}

TensorIdResult gaussian_tensor_id(const CpTensor& x, std::size_t k, std::size_t l, std::uint64_t seed,
                                  double rank_tol) {
    return tensor_id_from_sketch(x, tensor_sketch_for_id(TensorIdMethod::gaussian, x, k, l, seed), k,
                                 TensorIdMethod::gaussian, rank_tol);
}

TensorIdResult gram_tensor_id(const CpTensor& x, std::size_t k, double rank_tol) {
    check_rank(x, k);
    const std::size_t rank = x.rank();
    const DenseMatrix g = gram_hadamard(x);
    const PivotedQr pivots = cpqr(g, k, rank_tol);

    TensorIdResult out;
    out.method = TensorIdMethod::gram;
    out.j.assign(pivots.perm.begin(), pivots.perm.begin() + static_cast<std::ptrdiff_t>(k));
    out.numerical_rank = pivots.numerical_rank;

    // Rows j of G with columns in pivot order, factored without further pivoting.
    DenseMatrix b(k, rank);
    for (std::size_t c = 0; c < rank; ++c)
        for (std::size_t i = 0; i < k; ++i) b(i, c) = g(out.j[i], pivots.perm[c]);
    const PivotedQr t = householder_qr(b, k, rank_tol);

    DenseMatrix r11(k, k);
    DenseMatrix r12(k, rank - k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i <= c; ++i) r11(i, c) = t.r(i, c);
    for (std::size_t c = 0; c < rank - k; ++c)
        for (std::size_t i = 0; i < k; ++i) r12(i, c) = t.r(i, k + c);

    const double lead = std::abs(r11(0, 0));
    const double floor = lead > 0.0 ? rank_tol * lead : 1.0;
    bool floored = false;
    for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(r11(i, i)) <= floor) {
            r11(i, i) = std::copysign(floor, r11(i, i));
            floored = true;
        }
    }
    out.rank_deficient = floored || pivots.numerical_rank < k;
    const DenseMatrix s = rank > k ? triangular_solve(r11, r12) : DenseMatrix(k, 0);

    out.p = DenseMatrix(k, rank);
    for (std::size_t i = 0; i < k; ++i) out.p(i, pivots.perm[i]) = 1.0;
    for (std::size_t c = 0; c < rank - k; ++c) std::ranges::copy(s.col(c), out.p.col(pivots.perm[k + c]).begin());
    assemble(x, out);
    return out;
}

TensorIdResult compute_tensor_id(TensorIdMethod method, const CpTensor& x, std::size_t k, std::size_t l,
                                 std::uint64_t seed, double rank_tol) {
    switch (method) {
        case TensorIdMethod::tensorsketch: return tensorsketch_id(x, k, l, seed, rank_tol);
        case TensorIdMethod::gaussian: return gaussian_tensor_id(x, k, l, seed, rank_tol);
        case TensorIdMethod::gram: return gram_tensor_id(x, k, rank_tol);
    }
    throw ArgumentError("compute_tensor_id: unknown method");
}

}  // namespace sketchid
