#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/synthetic.hpp"

using namespace sketchid;

TEST_CASE("matrix with K = 1 has leading singular value near 1") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SparseMatrix a = gen_synthetic_matrix(200, 100, 1, 0.05, seed);
        const auto s = oracle::singular_values(to_dense(a));
        CHECK(std::abs(s[0] - 1.0) <= 0.2);
        CHECK(s[2] <= 1e-10);
    }
}

TEST_CASE("matrix density and spectrum gap") {
    const SparseMatrix a = gen_synthetic_matrix(2000, 500, 100, 0.005, 11);
    CHECK(a.rows() == 2000);
    CHECK(a.cols() == 500);
    const double density = static_cast<double>(a.nnz()) / (2000.0 * 500.0);
    CHECK(density >= 0.0025);
    CHECK(density <= 0.0075);
    const auto s = oracle::singular_values(to_dense(a));
    CHECK(s[100] <= 1e-6);
    CHECK(s[0] >= 0.5);
}

TEST_CASE("tensor s-values, unit columns and density") {
    const CpTensor x = gen_synthetic_tensor(5, 100, 50, 10, 0.05, 4);
    CHECK(x.order() == 5);
    CHECK(x.rank() == 50);
    for (double v : x.svalues()) {
        CHECK(v >= 1e-8 * (1 - 1e-12));
        CHECK(v <= 1.0);
    }
    CHECK(x.svalues()[0] == doctest::Approx(1.0));
    CHECK(x.svalues()[49] == doctest::Approx(1e-8));
    for (std::size_t n = 0; n < 5; ++n) {
        const auto& f = std::get<SparseMatrix>(x.factor(n));
        for (std::size_t r = 0; r < 50; ++r) CHECK(norm2(f.col_values(r)) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(static_cast<double>(f.nnz()) >= 0.6 * 0.05 * 100 * 50);
        CHECK(static_cast<double>(f.nnz()) <= 1.4 * 0.05 * 100 * 50);
    }
}

TEST_CASE("decay length controls where the s-values level off") {
    const CpTensor x = gen_synthetic_tensor(3, 20, 40, 5, 0.2, 1, 20);
    for (std::size_t r = 0; r < 20; ++r)
        CHECK(x.svalues()[r] == doctest::Approx(std::pow(10.0, -8.0 * static_cast<double>(r) / 40.0)));
    for (std::size_t r = 20; r < 40; ++r) CHECK(x.svalues()[r] == doctest::Approx(1e-8));
}

TEST_CASE("generators are deterministic") {
    const SparseMatrix a = gen_synthetic_matrix(300, 80, 10, 0.02, 9);
    const SparseMatrix b = gen_synthetic_matrix(300, 80, 10, 0.02, 9);
    CHECK(std::ranges::equal(a.col_ptr(), b.col_ptr()));
    CHECK(std::ranges::equal(a.row_idx(), b.row_idx()));
    CHECK(std::ranges::equal(a.values(), b.values()));
    const SparseMatrix c = gen_synthetic_matrix(300, 80, 10, 0.02, 10);
    CHECK(!std::ranges::equal(a.values(), c.values()));

    const CpTensor x = gen_synthetic_tensor(3, 30, 12, 4, 0.1, 2);
    const CpTensor y = gen_synthetic_tensor(3, 30, 12, 4, 0.1, 2);
    CHECK(std::ranges::equal(x.svalues(), y.svalues()));
    for (std::size_t n = 0; n < 3; ++n) CHECK(to_dense(x.factor(n)) == to_dense(y.factor(n)));
}

TEST_CASE("infeasible parameters") {
    CHECK_THROWS_AS(gen_synthetic_matrix(100, 100, 0, 0.1, 0), ArgumentError);
    CHECK_THROWS_AS(gen_synthetic_matrix(100, 15, 8, 0.1, 0), ArgumentError);   // 2K > R
    CHECK_THROWS_AS(gen_synthetic_matrix(100, 100, 5, 0.01, 0), ArgumentError);  // density·I < 4
    CHECK_THROWS_AS(gen_synthetic_matrix(100, 100, 5, 1.5, 0), ArgumentError);
    CHECK_THROWS_AS(gen_synthetic_tensor(3, 10, 5, 2, 0.05, 0), ArgumentError);  // density·I < 1
    CHECK_THROWS_AS(gen_synthetic_tensor(3, 10, 5, 6, 0.5, 0), ArgumentError);   // K > R
}
