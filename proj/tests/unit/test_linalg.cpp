#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "../oracles.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"

using namespace sketchid;

namespace {

// ‖q·r − a(:, perm)‖_F / ‖a‖_F for a factorization carried to k = min(m, n).
double qr_residual(const DenseMatrix& a, const PivotedQr& f) {
    const DenseMatrix permuted = a.select_columns(f.perm);
    return oracle::rel_error(oracle::multiply(f.q, f.r), permuted);
}

void check_orthonormal(const DenseMatrix& q, double tol) {
    const DenseMatrix g = oracle::multiply(q.transpose(), q);
    for (std::size_t j = 0; j < g.cols(); ++j)
        for (std::size_t i = 0; i < g.rows(); ++i) CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) <= tol);
}

}  // namespace

TEST_CASE("cpqr small cases") {
    SUBCASE("identity") {
        const PivotedQr f = cpqr(DenseMatrix::identity(3), 3);
        CHECK(f.numerical_rank == 3);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(f.r(i, j)) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
    SUBCASE("pivot on the larger column") {
        const PivotedQr f = cpqr(DenseMatrix::from_rows({{2, 1}, {0, 0}}), 1);
        CHECK(f.perm[0] == 0);
        CHECK(std::abs(f.r(0, 0)) == 2.0);
        CHECK(f.perm.size() == 2);
    }
    SUBCASE("ties go to the lowest index") {
        const PivotedQr f = cpqr(DenseMatrix::from_rows({{0, 1, 0}, {1, 0, 1}}), 2);
        CHECK(f.perm[0] == 0);
        CHECK(f.perm[1] == 1);
    }
    SUBCASE("zero matrix") {
        const PivotedQr f = cpqr(DenseMatrix(4, 3), 2);
        CHECK(f.numerical_rank == 0);
        CHECK(f.perm.size() == 3);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(cpqr(DenseMatrix(3, 2), 0), ArgumentError);
        CHECK_THROWS_AS(cpqr(DenseMatrix(3, 2), 3), ArgumentError);
    }
}

TEST_CASE("cpqr detects the rank of a product of thin Gaussians") {
    const DenseMatrix a = oracle::multiply(oracle::random_dense(50, 10, 1), oracle::random_dense(10, 30, 2));
    const auto sv = oracle::singular_values(a);
    REQUIRE(sv[9] > 1e-10 * sv[0]);
    REQUIRE(sv[10] < 1e-13 * sv[0]);
    const PivotedQr f = cpqr(a, 30, 1e-10);
    CHECK(f.numerical_rank == 10);
}

TEST_CASE("cpqr factorization properties on random inputs") {
    const std::size_t shapes[][2] = {{5, 5}, {20, 7}, {7, 20}, {60, 40}, {200, 200}, {120, 30}};
    std::uint64_t seed = 100;
    for (const auto& sh : shapes) {
        const DenseMatrix a = oracle::random_dense(sh[0], sh[1], ++seed);
        const std::size_t k = std::min(sh[0], sh[1]);
        const PivotedQr f = cpqr(a, k);
        CAPTURE(sh[0]);
        CAPTURE(sh[1]);
        CHECK(qr_residual(a, f) <= 1e-10);
        check_orthonormal(f.q, 1e-12);
        for (std::size_t i = 1; i < k; ++i) CHECK(std::abs(f.r(i, i)) <= std::abs(f.r(i - 1, i - 1)));
        for (std::size_t j = 0; j < f.r.cols(); ++j)
            for (std::size_t i = j + 1; i < f.r.rows(); ++i) CHECK(f.r(i, j) == 0.0);
        // perm is a permutation
        std::vector<std::size_t> sorted = f.perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
    }
}

TEST_CASE("truncated cpqr keeps a consistent leading block") {
    const DenseMatrix a = oracle::random_dense(40, 25, 9);
    const PivotedQr full = cpqr(a, 25);
    const PivotedQr part = cpqr(a, 6);
    CHECK(part.r.rows() == 6);
    CHECK(part.q.cols() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(part.perm[i] == full.perm[i]);
    check_orthonormal(part.q, 1e-12);
    // q·r reproduces the first k pivoted columns exactly (up to rounding).
    const DenseMatrix lead = a.select_columns(std::vector<std::size_t>(part.perm.begin(), part.perm.begin() + 6));
    const DenseMatrix qr = oracle::multiply(part.q, part.r).select_columns(std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK(oracle::rel_error(qr, lead) <= 1e-12);
}

TEST_CASE("unpivoted householder qr") {
    const DenseMatrix a = oracle::random_dense(30, 12, 21);
    const PivotedQr f = householder_qr(a, 12);
    for (std::size_t i = 0; i < 12; ++i) CHECK(f.perm[i] == i);
    CHECK(qr_residual(a, f) <= 1e-12);
    check_orthonormal(f.q, 1e-12);
}

TEST_CASE("svd_values") {
    CHECK(svd_values(DenseMatrix::from_rows({{3, 0}, {0, 1}})) == std::vector<double>{3.0, 1.0});
    const auto p = svd_values(DenseMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-15));

    const DenseMatrix a = oracle::random_dense(20, 8, 5);
    const DenseMatrix g = oracle::multiply(a.transpose(), a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(oracle::to_eigen(g));
    const auto s = svd_values(a);
    REQUIRE(s.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(s[i] - std::sqrt(eig.eigenvalues()(7 - i))) <= 1e-10);
    for (std::size_t i = 1; i < 8; ++i) CHECK(s[i] <= s[i - 1]);

    const auto st = svd_values(a.transpose());
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(s[i] - st[i]) <= 1e-10);

    DenseMatrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_values(bad), ArgumentError);
    CHECK_THROWS_AS(svd_values(DenseMatrix()), ArgumentError);
}

TEST_CASE("products") {
    SUBCASE("small exact cases") {
        const DenseMatrix b = oracle::random_dense(6, 3, 7);
        CHECK(spmm(SparseMatrix::identity(6), b) == b);
        CHECK(gemm(DenseMatrix::from_rows({{2}}), DenseMatrix::from_rows({{3}})) == DenseMatrix::from_rows({{6}}));
        CHECK_THROWS_AS(gemm(DenseMatrix(2, 3), DenseMatrix(2, 3)), ArgumentError);
        CHECK_THROWS_AS(spmm(SparseMatrix(2, 3), DenseMatrix(2, 3)), ArgumentError);
    }
    SUBCASE("random sparse times dense") {
        const SparseMatrix a = oracle::random_sparse(30, 20, 0.1, 8);
        const DenseMatrix b = oracle::random_dense(20, 5, 9);
        const DenseMatrix want = oracle::multiply(a.to_dense(), b);
        CHECK(oracle::rel_error(spmm(a, b), want) <= 1e-12);
        const DenseMatrix c = oracle::random_dense(30, 4, 10);
        CHECK(oracle::rel_error(spmm_tn(a, c), oracle::multiply(a.to_dense().transpose(), c)) <= 1e-12);
        CHECK(oracle::rel_error(gemm(a.to_dense(), b), want) <= 1e-12);
        CHECK(oracle::rel_error(gemm_tn(c, a.to_dense()), oracle::multiply(c.transpose(), a.to_dense())) <= 1e-12);
    }
    SUBCASE("integer entries agree bit for bit") {
        std::vector<Triplet> t;
        DenseMatrix b(12, 4);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j < 4; ++j) b(i, j) = static_cast<double>((3 * i + 5 * j) % 7) - 3.0;
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 12; ++j)
                if ((i * 7 + j * 3) % 4 == 0) t.push_back({i, j, static_cast<double>((i + 2 * j) % 5) - 2.0});
        const SparseMatrix a = SparseMatrix::from_triplets(9, 12, t);
        CHECK(spmm(a, b) == gemm(a.to_dense(), b));
        CHECK(spmm(a, b) == oracle::multiply(a.to_dense(), b));
    }
    SUBCASE("matvec") {
        const SparseMatrix a = oracle::random_sparse(15, 9, 0.3, 3);
        const DenseMatrix x = oracle::random_dense(9, 1, 4);
        const DenseMatrix y = oracle::random_dense(15, 1, 5);
        const auto ax = matvec(a, x.col(0));
        const auto dax = matvec(a.to_dense(), x.col(0));
        const auto aty = matvec_t(a, y.col(0));
        const auto want = oracle::multiply(a.to_dense(), x);
        const auto want_t = oracle::multiply(a.to_dense().transpose(), y);
        for (std::size_t i = 0; i < 15; ++i) CHECK(ax[i] == doctest::Approx(want(i, 0)).epsilon(1e-13));
        for (std::size_t i = 0; i < 15; ++i) CHECK(dax[i] == doctest::Approx(want(i, 0)).epsilon(1e-13));
        for (std::size_t i = 0; i < 9; ++i) CHECK(aty[i] == doctest::Approx(want_t(i, 0)).epsilon(1e-13));
    }
    SUBCASE("gram") {
        const SparseMatrix a = oracle::random_sparse(40, 12, 0.2, 6);
        const DenseMatrix want = oracle::multiply(a.to_dense().transpose(), a.to_dense());
        CHECK(oracle::rel_error(gram(a), want) <= 1e-13);
        CHECK(oracle::rel_error(gram(a.to_dense()), want) <= 1e-13);
    }
}

TEST_CASE("triangular solve") {
    const DenseMatrix r = DenseMatrix::from_rows({{4, 1, -2}, {0, 3, 0.5}, {0, 0, 2}});
    const DenseMatrix b = oracle::random_dense(3, 4, 1);
    const DenseMatrix x = triangular_solve(r, b);
    CHECK(oracle::rel_error(oracle::multiply(r, x), b) <= 1e-14);

    const DenseMatrix rr = oracle::random_dense(30, 30, 2);
    DenseMatrix upper(30, 30);
    for (std::size_t j = 0; j < 30; ++j) {
        for (std::size_t i = 0; i < j; ++i) upper(i, j) = rr(i, j);
        upper(j, j) = 5.0 + std::abs(rr(j, j));
    }
    const DenseMatrix bb = oracle::random_dense(30, 3, 3);
    CHECK(oracle::rel_error(oracle::multiply(upper, triangular_solve(upper, bb)), bb) <= 1e-10);

    DenseMatrix singular = r;
    singular(1, 1) = 0.0;
    try {
        triangular_solve(singular, b);
        FAIL("expected SingularError");
    } catch (const SingularError& e) {
        CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(triangular_solve(r, DenseMatrix(2, 1)), ArgumentError);
}
