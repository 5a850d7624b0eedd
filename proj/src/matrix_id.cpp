#include "sketchid/matrix_id.hpp"

#include <algorithm>
#include <cmath>

#include "sketchid/errors.hpp"

namespace sketchid {

std::string_view to_string(IdMethod m) noexcept {
    switch (m) {
        case IdMethod::deterministic: return "deterministic";
        case IdMethod::gaussian: return "gaussian";
        case IdMethod::srft: return "srft";
        case IdMethod::countsketch: return "countsketch";
    }
    return "unknown";
}

std::optional<IdMethod> parse_id_method(std::string_view name) noexcept {
    for (auto m : {IdMethod::deterministic, IdMethod::gaussian, IdMethod::srft, IdMethod::countsketch})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

double InterpolativeDecomposition::max_abs_coefficient() const {
    double m = 0.0;
    for (double v : p.data()) m = std::max(m, std::abs(v));
    return m;
}

InterpolativeDecomposition matrix_id(const DenseMatrix& a, std::size_t k, double rank_tol) {
    require(k >= 1 && k <= std::min(a.rows(), a.cols()), "matrix_id: target rank must satisfy 1 <= k <= min(rows, cols)");
    if (!a.all_finite()) throw NumericalError("matrix_id: non-finite input");
    const std::size_t n = a.cols();
    PivotedQr qr = cpqr(a, k, rank_tol);

    InterpolativeDecomposition id;
    id.k = k;
    id.numerical_rank = qr.numerical_rank;
    id.rank_deficient = qr.numerical_rank < k;
    id.j.assign(qr.perm.begin(), qr.perm.begin() + static_cast<std::ptrdiff_t>(k));

    DenseMatrix r11(k, k);
    DenseMatrix r12(k, n - k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i <= c; ++i) r11(i, c) = qr.r(i, c);
    for (std::size_t c = 0; c < n - k; ++c)
        for (std::size_t i = 0; i < k; ++i) r12(i, c) = qr.r(i, k + c);

    // A zero matrix has r = 0 throughout; a unit floor then yields p = [I 0].
    const double lead = std::abs(r11(0, 0));
    const double floor = lead > 0.0 ? rank_tol * lead : 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(r11(i, i)) <= floor) r11(i, i) = std::copysign(floor, r11(i, i));
    }
    const DenseMatrix s = n > k ? triangular_solve(r11, r12) : DenseMatrix(k, 0);

    id.p = DenseMatrix(k, n);
    for (std::size_t i = 0; i < k; ++i) id.p(i, qr.perm[i]) = 1.0;
    for (std::size_t c = 0; c < n - k; ++c) std::ranges::copy(s.col(c), id.p.col(qr.perm[k + c]).begin());
    return id;
}

DenseMatrix sketch_for_id(IdMethod method, const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed) {
    const std::size_t rows = rows_of(a);
    require(k >= 1 && k <= cols_of(a), "sketched ID: target rank must satisfy 1 <= k <= cols");
    require(k <= l, "sketched ID: sketch dimension L must be at least k");
    require(l < rows, "sketched ID: sketch dimension L must be below the row count (use the deterministic ID)");
    switch (method) {
        case IdMethod::countsketch:
            return apply_countsketch(CountSketchOp(rows, l, HashMode::surjective, seed), a);
        case IdMethod::gaussian: return apply_gaussian(GaussianOp(rows, l, seed), a);
        case IdMethod::srft: return apply_srft(SrftOp(rows, l, seed), a);
        case IdMethod::deterministic: break;
    }
    throw ArgumentError("sketch_for_id: the deterministic method does not sketch");
}

namespace {

InterpolativeDecomposition finish(DenseMatrix y, std::size_t k, IdMethod method, double rank_tol) {
    const std::size_t l = y.rows();
    InterpolativeDecomposition id = matrix_id(y, k, rank_tol);
    id.method = method;
    id.sketch_rows = l;
    return id;
}

}  // namespace

InterpolativeDecomposition countsketch_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                          HashMode mode, double rank_tol) {
    require(k >= 1 && k <= cols_of(a), "countsketch_id: target rank must satisfy 1 <= k <= cols");
    require(k <= l && l < rows_of(a), "countsketch_id: sketch dimension must satisfy k <= L < rows");
    const CountSketchOp s(rows_of(a), l, mode, seed);
    return finish(apply_countsketch(s, a), k, IdMethod::countsketch, rank_tol);
}

InterpolativeDecomposition gaussian_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                       double rank_tol) {
    return finish(sketch_for_id(IdMethod::gaussian, a, k, l, seed), k, IdMethod::gaussian, rank_tol);
}

InterpolativeDecomposition srft_id(const AnyMatrix& a, std::size_t k, std::size_t l, std::uint64_t seed,
                                   double rank_tol) {
    return finish(sketch_for_id(IdMethod::srft, a, k, l, seed), k, IdMethod::srft, rank_tol);
}

InterpolativeDecomposition compute_id(IdMethod method, const AnyMatrix& a, std::size_t k, std::size_t l,
                                      std::uint64_t seed, double rank_tol) {
    switch (method) {
        case IdMethod::deterministic: return matrix_id(to_dense(a), k, rank_tol);
        case IdMethod::countsketch: return countsketch_id(a, k, l, seed, HashMode::surjective, rank_tol);
        case IdMethod::gaussian: return gaussian_id(a, k, l, seed, rank_tol);
        case IdMethod::srft: return srft_id(a, k, l, seed, rank_tol);
    }
    throw ArgumentError("compute_id: unknown method");
}

DenseMatrix reconstruct(const AnyMatrix& a, const InterpolativeDecomposition& id) {
    require(id.p.cols() == cols_of(a), "reconstruct: ID does not match the operand's column count");
    if (const auto* s = std::get_if<SparseMatrix>(&a)) return spmm(s->select_columns(id.j), id.p);
    return gemm(std::get<DenseMatrix>(a).select_columns(id.j), id.p);
}

double id_norm_bound(std::size_t k, std::size_t r) noexcept {
    return std::sqrt(4.0 * static_cast<double>(k) * static_cast<double>(r - std::min(k, r)) + 1.0);
}

}  // namespace sketchid
