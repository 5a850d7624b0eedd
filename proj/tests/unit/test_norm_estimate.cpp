#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/norm_estimate.hpp"

using namespace sketchid;

namespace {

struct DenseOperator {
    LinearMap apply;
    LinearMap adjoint;
};

DenseOperator as_operator(const DenseMatrix& a) {
    auto m = std::make_shared<DenseMatrix>(a);
    return {[m](std::span<const double> x) { return matvec(*m, x); },
            [m](std::span<const double> y) { return matvec_t(*m, y); }};
}

DenseMatrix diag(std::initializer_list<double> d) {
    DenseMatrix a(d.size(), d.size());
    std::size_t i = 0;
    for (double v : d) a(i, i) = v, ++i;
    return a;
}

}  // namespace

TEST_CASE("known spectrum") {
    const auto op = as_operator(diag({3.0, 1.0, 0.5}));
    const NormEstimate e = est_spectral_norm(op.apply, op.adjoint, 3, 20, 3, 0);
    CHECK(e.value >= 2.999);
    CHECK(e.value <= 3.0);
    CHECK(e.iterations == 20);
    CHECK(e.probes == 3);
}

TEST_CASE("zero operator") {
    const auto op = as_operator(DenseMatrix(7, 4));
    CHECK(est_spectral_norm(op.apply, op.adjoint, 4).value == 0.0);
}

TEST_CASE("mismatched adjoint is rejected") {
    const DenseMatrix a = oracle::random_dense(6, 5, 1);
    const DenseMatrix b = oracle::random_dense(6, 5, 2);
    const auto good = as_operator(a);
    const auto bad = as_operator(b);
    CHECK_THROWS_AS(est_spectral_norm(good.apply, bad.adjoint, 5), ArgumentError);
    CHECK_THROWS_AS(est_spectral_norm(good.apply, good.adjoint, 5, 10, 0), ArgumentError);
}

TEST_CASE("estimates never exceed the true norm and grow with iterations") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t rows = 5 + seed % 23;
        const std::size_t cols = 3 + (seed * 7) % 19;
        const DenseMatrix a = oracle::random_dense(rows, cols, 100 + seed);
        const auto op = as_operator(a);
        const double truth = oracle::spectral_norm(a);
        for (std::size_t iters : {1, 2, 4, 8}) {
            const double e1 = est_spectral_norm(op.apply, op.adjoint, cols, iters, 2, seed).value;
            const double e2 = est_spectral_norm(op.apply, op.adjoint, cols, 2 * iters, 2, seed).value;
            CHECK(e1 <= truth + 1e-10);
            CHECK(e2 <= truth + 1e-10);
            CHECK(e2 >= e1 - 1e-12);
        }
    }
}

TEST_CASE("estimates reach a hundredth of the norm in nearly every run") {
    std::size_t hits = 0;
    for (std::uint64_t run = 0; run < 1000; ++run) {
        const DenseMatrix a = oracle::random_dense(100, 60, 5000 + run);
        const auto op = as_operator(a);
        const double truth = oracle::spectral_norm_gram(a);
        const double e = est_spectral_norm(op.apply, op.adjoint, 60, 10, 2, run).value;
        CHECK(e <= truth + 1e-10);
        hits += e >= truth / 100.0 ? 1 : 0;
    }
    CHECK(hits >= 990);
}

TEST_CASE("ID residual operator matches the densified residual") {
    const SparseMatrix a = oracle::random_sparse(40, 25, 0.3, 7);
    const AnyMatrix any = a;
    const InterpolativeDecomposition id = compute_id(IdMethod::deterministic, any, 6, 0, 0);
    const ResidualOperator res = id_residual(any, id);
    CHECK(res.rows == 40);
    CHECK(res.cols == 25);
    const DenseMatrix dense_res = reconstruct(any, id) - to_dense(any);
    const DenseMatrix x = oracle::random_dense(25, 1, 3);
    const DenseMatrix y = oracle::random_dense(40, 1, 4);
    const auto bx = res.apply(x.col(0));
    const auto want = oracle::multiply(dense_res, x);
    for (std::size_t i = 0; i < 40; ++i) CHECK(bx[i] == doctest::Approx(want(i, 0)).epsilon(1e-12));
    const auto bty = res.apply_adjoint(y.col(0));
    const auto want_t = oracle::multiply(dense_res.transpose(), y);
    for (std::size_t i = 0; i < 25; ++i) CHECK(bty[i] == doctest::Approx(want_t(i, 0)).epsilon(1e-12));

    const double truth = oracle::spectral_norm(dense_res);
    const NormEstimate e = estimate_id_error(any, id, 30, 3, 1);
    CHECK(e.value <= truth + 1e-10);
    CHECK(e.value >= 0.5 * truth);
}
