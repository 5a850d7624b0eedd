#include "sketchid/norm_estimate.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/random.hpp"

namespace sketchid {

namespace {

constexpr std::uint64_t kProbeStream = 5;
constexpr std::uint64_t kAdjointStream = 6;
constexpr double kAdjointTol = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_adjoint(const LinearMap& apply, const LinearMap& apply_adjoint, std::size_t cols, double term_scale,
                   std::uint64_t seed) {
    const std::uint64_t key = rng::derive(seed, kAdjointStream);
    std::vector<double> x(cols);
    rng::gaussian_block(key, 0, x);
    const std::vector<double> bx = apply(x);
    std::vector<double> y(bx.size());
    rng::gaussian_block(key, 1, y);
    const std::vector<double> bty = apply_adjoint(y);
    require(bty.size() == cols, "est_spectral_norm: adjoint maps to " + std::to_string(bty.size()) +
                                    " entries, expected " + std::to_string(cols));
    const double lhs = dot(bx, y);
    const double rhs = dot(x, bty);
    const double scale = norm2(bx) * norm2(y) + norm2(x) * norm2(bty) + 2.0 * term_scale * norm2(x) * norm2(y);
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) throw NumericalError("est_spectral_norm: non-finite operator output");
    require(std::abs(lhs - rhs) <= kAdjointTol * scale,
            "est_spectral_norm: operator and adjoint are inconsistent (<Bx,y> != <x,B^T y>)");
}

}  // namespace

NormEstimate est_spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, std::size_t cols,
                               std::size_t iters, std::size_t probes, std::uint64_t seed, double term_scale) {
    require(cols >= 1, "est_spectral_norm: operator must have at least one column");
    require(probes >= 1, "est_spectral_norm: at least one probe is required");
    require(term_scale >= 0.0, "est_spectral_norm: term scale must be nonnegative");
    check_adjoint(apply, apply_adjoint, cols, term_scale, seed);

    NormEstimate est;
    est.iterations = iters;
    est.probes = probes;
    const std::uint64_t key = rng::derive(seed, kProbeStream);
    std::vector<double> v(cols);
    for (std::size_t p = 0; p < probes; ++p) {
        rng::gaussian_block(key, p, v);
        double value = 0.0;
        for (std::size_t it = 0;; ++it) {
            const double nv = norm2(v);
            if (nv == 0.0) break;
            for (double& t : v) t /= nv;
            const std::vector<double> bv = apply(v);
            value = norm2(bv);
            if (it == iters || value == 0.0) break;
            v = apply_adjoint(bv);
        }
        est.value = std::max(est.value, value);
    }
    return est;
}

ResidualOperator id_residual(const AnyMatrix& a, const InterpolativeDecomposition& id) {
    require(id.p.cols() == cols_of(a), "id_residual: ID does not match the operand's column count");
    ResidualOperator op;
    op.rows = rows_of(a);
    op.cols = cols_of(a);
    // The selected columns are copied once; the maps share them.
    auto selected = std::make_shared<const AnyMatrix>(
        std::visit([&](const auto& m) -> AnyMatrix { return m.select_columns(id.j); }, a));
    auto frobenius = [](const AnyMatrix& m) {
        if (const auto* s = std::get_if<SparseMatrix>(&m)) return norm2(s->values());
        return norm2(std::get<DenseMatrix>(m).data());
    };
    op.term_scale = frobenius(a) + frobenius(*selected) * norm2(id.p.data());
    const DenseMatrix* p = &id.p;
    const AnyMatrix* full = &a;
    op.apply = [selected, p, full](std::span<const double> x) {
        const std::vector<double> px = matvec(*p, x);
        std::vector<double> out = std::visit([&](const auto& m) { return matvec(m, px); }, *selected);
        const std::vector<double> ax = std::visit([&](const auto& m) { return matvec(m, x); }, *full);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= ax[i];
        return out;
    };
    op.apply_adjoint = [selected, p, full](std::span<const double> y) {
        const std::vector<double> sy = std::visit([&](const auto& m) { return matvec_t(m, y); }, *selected);
        std::vector<double> out = matvec_t(*p, sy);
        const std::vector<double> aty = std::visit([&](const auto& m) { return matvec_t(m, y); }, *full);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= aty[i];
        return out;
    };
    return op;
}

NormEstimate estimate_id_error(const AnyMatrix& a, const InterpolativeDecomposition& id, std::size_t iters,
                               std::size_t probes, std::uint64_t seed) {
    const ResidualOperator op = id_residual(a, id);
    return est_spectral_norm(op.apply, op.apply_adjoint, op.cols, iters, probes, seed, op.term_scale);
}

}  // namespace sketchid
