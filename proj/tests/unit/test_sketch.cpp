#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <set>

#include "../oracles.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/sketch.hpp"

using namespace sketchid;

TEST_CASE("countsketch construction") {
    SUBCASE("surjective with L = I is a permutation") {
        const CountSketchOp s(4, 4, HashMode::surjective, 3);
        std::vector<std::uint32_t> b(s.bucket().begin(), s.bucket().end());
        std::sort(b.begin(), b.end());
        CHECK(b == std::vector<std::uint32_t>{0, 1, 2, 3});
    }
    SUBCASE("surjective fills every bucket") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const CountSketchOp s(1000, 10, HashMode::surjective, seed);
            std::set<std::uint32_t> hit(s.bucket().begin(), s.bucket().end());
            CHECK(hit.size() == 10);
        }
    }
    SUBCASE("signs are plus or minus one") {
        const CountSketchOp s(500, 7, HashMode::standard, 1);
        for (double v : s.sign()) CHECK((v == 1.0 || v == -1.0));
        for (auto b : s.bucket()) CHECK(b < 7);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(CountSketchOp(3, 4, HashMode::surjective, 0), ArgumentError);
        CHECK_THROWS_AS(CountSketchOp(3, 0, HashMode::standard, 0), ArgumentError);
        CHECK_NOTHROW(CountSketchOp(3, 4, HashMode::standard, 0));
        CHECK_THROWS_AS(CountSketchOp(2, {0, 2}, {1.0, 1.0}), ArgumentError);
        CHECK_THROWS_AS(CountSketchOp(2, {0, 1}, {1.0, 0.5}), ArgumentError);
    }
    SUBCASE("replay matches the reference integer streams") {
        // Values from an independent reimplementation of the hashing streams.
        const CountSketchOp st(10, 4, HashMode::standard, 42);
        CHECK(std::vector<std::uint32_t>(st.bucket().begin(), st.bucket().end()) ==
              std::vector<std::uint32_t>{0, 3, 2, 3, 2, 1, 1, 3, 3, 3});
        CHECK(std::vector<double>(st.sign().begin(), st.sign().end()) ==
              std::vector<double>{1, -1, -1, -1, 1, -1, -1, 1, 1, -1});
        const CountSketchOp sj(10, 4, HashMode::surjective, 42);
        CHECK(std::vector<std::uint32_t>(sj.bucket().begin(), sj.bucket().end()) ==
              std::vector<std::uint32_t>{1, 1, 2, 0, 0, 3, 2, 3, 2, 3});
        const TensorSketchOp t({4, 4}, 5, 7);
        CHECK(std::vector<std::uint32_t>(t.modes()[0].bucket().begin(), t.modes()[0].bucket().end()) ==
              std::vector<std::uint32_t>{4, 1, 3, 4});
        CHECK(std::vector<std::uint32_t>(t.modes()[1].bucket().begin(), t.modes()[1].bucket().end()) ==
              std::vector<std::uint32_t>{2, 4, 0, 4});
    }
}

TEST_CASE("standard countsketch buckets are uniform (chi-square)") {
    const std::size_t in_dim = 10000, out_dim = 100, draws = 500;
    std::vector<double> counts(out_dim, 0.0);
    for (std::uint64_t seed = 0; seed < draws; ++seed) {
        const CountSketchOp s(in_dim, out_dim, HashMode::standard, seed);
        for (auto b : s.bucket()) counts[b] += 1.0;
    }
    const double expected = static_cast<double>(in_dim * draws) / out_dim;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 148.23);  // 0.999 quantile of chi-square with 99 degrees of freedom
}

TEST_CASE("countsketch apply") {
    SUBCASE("hand example") {
        const CountSketchOp s(2, {0, 1, 0, 1}, {1.0, -1.0, 1.0, 1.0});
        CHECK(apply_countsketch(s, DenseMatrix::identity(4)) == DenseMatrix::from_rows({{1, 0, 1, 0}, {0, -1, 0, 1}}));
        CHECK(apply_countsketch(s, SparseMatrix::identity(4)) == DenseMatrix::from_rows({{1, 0, 1, 0}, {0, -1, 0, 1}}));
    }
    SUBCASE("permutation hash permutes rows") {
        const CountSketchOp s(4, {2, 0, 3, 1}, {1.0, 1.0, 1.0, 1.0});
        const DenseMatrix a = oracle::random_dense(4, 3, 1);
        const DenseMatrix y = apply_countsketch(s, a);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(y(s.bucket()[i], j) == a(i, j));
    }
    SUBCASE("random sparse against the densified operator") {
        const SparseMatrix a = oracle::random_sparse(100, 15, 0.05, 2);
        const CountSketchOp s(100, 20, HashMode::standard, 5);
        const DenseMatrix want = oracle::multiply(oracle::countsketch_matrix(20, s.bucket(), s.sign()), a.to_dense());
        CHECK(oracle::rel_error(apply_countsketch(s, a), want) <= 1e-13);
        CHECK(oracle::rel_error(apply_countsketch(s, a.to_dense()), want) <= 1e-13);
    }
    SUBCASE("Frobenius norm of the operator and full rank of the surjective variant") {
        const CountSketchOp s(60, 12, HashMode::surjective, 9);
        const DenseMatrix d = s.to_dense();
        CHECK(d == oracle::countsketch_matrix(12, s.bucket(), s.sign()));
        double fro2 = 0.0;
        for (double v : d.data()) fro2 += v * v;
        CHECK(fro2 == 60.0);
        const auto sv = oracle::singular_values(d);
        CHECK(sv.back() >= 1.0 - 1e-12);  // each row holds at least one ±1 in its own columns
        CHECK_THROWS_AS(apply_countsketch(s, DenseMatrix(59, 2)), ArgumentError);
    }
}

TEST_CASE("countsketch subspace embedding frequency") {
    const std::size_t in_dim = 2000, k = 5, beta = 10, l = 2 * beta * (k * k + k);
    int good = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const Eigen::MatrixXd g = oracle::to_eigen(oracle::random_dense(in_dim, k, 1000 + trial));
        const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                                  Eigen::MatrixXd::Identity(in_dim, k);
        const CountSketchOp s(in_dim, l, HashMode::standard, trial);
        const Eigen::MatrixXd su = oracle::to_eigen(apply_countsketch(s, oracle::from_eigen(u)));
        const Eigen::MatrixXd e = su.transpose() * su - Eigen::MatrixXd::Identity(k, k);
        const double nrm = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues().cwiseAbs().maxCoeff();
        good += nrm <= 0.5 ? 1 : 0;
    }
    CHECK(good >= 180);
}

TEST_CASE("tensorsketch") {
    SUBCASE("single mode reduces to countsketch of the scaled factor") {
        const DenseMatrix a = oracle::random_dense(9, 4, 3);
        const std::vector<double> lambda{1.5, -2.0, 0.25, 3.0};
        const TensorSketchOp t({9}, 6, 11);
        const std::vector<AnyMatrix> f{a};
        DenseMatrix scaled = a;
        for (std::size_t c = 0; c < 4; ++c)
            for (double& v : scaled.col(c)) v *= lambda[c];
        CHECK(oracle::rel_error(apply_tensorsketch(t, f, lambda), apply_countsketch(t.modes()[0], scaled)) <= 1e-12);
    }
    SUBCASE("two modes against the composite hash on the Khatri-Rao product") {
        const std::vector<AnyMatrix> f{oracle::random_dense(3, 2, 1), oracle::random_dense(3, 2, 2)};
        const std::vector<double> lambda{0.7, 1.3};
        const TensorSketchOp t({3, 3}, 4, 5);
        const DenseMatrix want = oracle::multiply(oracle::composite_countsketch(t), oracle::dense_m(f, lambda));
        CHECK(oracle::rel_error(apply_tensorsketch(t, f, lambda), want) <= 1e-12);
        CHECK(oracle::composite_countsketch(t) == t.to_dense());
    }
    SUBCASE("all-ones factors give signed bucket counts") {
        const std::vector<AnyMatrix> f(3, AnyMatrix(DenseMatrix::from_rows({{1}, {1}})));
        const std::vector<double> lambda{1.0};
        for (std::size_t l : {1, 2, 3, 5, 8}) {
            const TensorSketchOp t({2, 2, 2}, l, 13 + l);
            const DenseMatrix y = apply_tensorsketch(t, f, lambda);
            const DenseMatrix s = oracle::composite_countsketch(t);
            double total = 0.0, sign_sum = 0.0;
            for (std::size_t i = 0; i < l; ++i) total += y(i, 0);
            for (double v : s.data()) sign_sum += v;
            CHECK(total == doctest::Approx(sign_sum).epsilon(1e-12));
            CHECK(oracle::rel_error(y, oracle::multiply(s, oracle::dense_m(f, lambda))) <= 1e-12);
        }
    }
    SUBCASE("hash and sign of an index tuple") {
        const TensorSketchOp t({3, 4, 2}, 5, 21);
        const DenseMatrix s = t.to_dense();
        const std::vector<std::size_t> idx{2, 1, 1};
        const std::size_t lin = 2 + 3 * (1 + 4 * 1);
        CHECK(s(t.hash(idx), lin) == t.sign(idx));
    }
    SUBCASE("argument checks") {
        const TensorSketchOp t({3, 3}, 4, 5);
        const std::vector<AnyMatrix> wrong_rank{oracle::random_dense(3, 2, 1), oracle::random_dense(3, 3, 2)};
        const std::vector<double> lambda{1.0, 1.0};
        CHECK_THROWS_AS(apply_tensorsketch(t, wrong_rank, lambda), ArgumentError);
        CHECK_THROWS_AS(apply_tensorsketch(t, std::vector<AnyMatrix>{}, lambda), ArgumentError);
        CHECK_THROWS_AS(TensorSketchOp(std::vector<std::size_t>{}, 4, 1), ArgumentError);
    }
}

TEST_CASE("srft") {
    SUBCASE("DC row gives column sums") {
        const DenseMatrix a = oracle::random_dense(7, 3, 2);
        const SrftOp s(std::vector<double>(7, 1.0), std::vector<std::size_t>{0});
        const DenseMatrix y = apply_srft(s, a);
        for (std::size_t j = 0; j < 3; ++j) {
            double sum = 0.0;
            for (double v : a.col(j)) sum += v;
            CHECK(y(0, j) == doctest::Approx(sum).epsilon(1e-13));
        }
    }
    SUBCASE("identity input reproduces sampled DFT rows") {
        for (std::size_t n : {8, 9}) {
            const SrftOp s(n, n, 4);
            CHECK(oracle::rel_error(apply_srft(s, DenseMatrix::identity(n)), oracle::srft_matrix(s)) <= 1e-12);
            CHECK(oracle::rel_error(s.to_dense(), oracle::srft_matrix(s)) <= 1e-12);
        }
    }
    SUBCASE("the real DFT is a scaled orthogonal matrix") {
        const DenseMatrix f = oracle::real_dft(12);
        const DenseMatrix g = oracle::multiply(f, f.transpose());
        CHECK(oracle::rel_error(g, 12.0 * DenseMatrix::identity(12)) <= 1e-14);
    }
    SUBCASE("random input against the dense operator") {
        const DenseMatrix a = oracle::random_dense(64, 10, 5);
        const SrftOp s(64, 16, 6);
        CHECK(oracle::rel_error(apply_srft(s, a), oracle::multiply(oracle::srft_matrix(s), a)) <= 1e-11);
        const SparseMatrix sp = oracle::random_sparse(50, 2100, 0.01, 7);  // spans several column blocks
        const SrftOp s2(50, 12, 8);
        CHECK(oracle::rel_error(apply_srft(s2, sp), oracle::multiply(oracle::srft_matrix(s2), sp.to_dense())) <= 1e-11);
    }
    SUBCASE("sample rows are distinct") {
        const SrftOp s(100, 60, 1);
        std::set<std::size_t> rows(s.sample_rows().begin(), s.sample_rows().end());
        CHECK(rows.size() == 60);
        CHECK(*rows.rbegin() < 100);
        CHECK_THROWS_AS(SrftOp(10, 11, 1), ArgumentError);
        CHECK_THROWS_AS(SrftOp(std::vector<double>(4, 1.0), std::vector<std::size_t>{1, 1}), ArgumentError);
    }
}

TEST_CASE("gaussian sketches") {
    SUBCASE("zero input") {
        const GaussianOp g(10, 4, 1);
        CHECK(apply_gaussian(g, SparseMatrix(10, 3)) == DenseMatrix(4, 3));
        CHECK(apply_gaussian(g, DenseMatrix(10, 3)) == DenseMatrix(4, 3));
    }
    SUBCASE("sparse and dense paths agree with the dense operator") {
        const SparseMatrix a = oracle::random_sparse(40, 6, 0.1, 3);
        const GaussianOp g(40, 7, 2);
        const DenseMatrix want = oracle::multiply(g.to_dense(), a.to_dense());
        CHECK(oracle::rel_error(apply_gaussian(g, a), want) <= 1e-13);
        CHECK(oracle::rel_error(apply_gaussian(g, a.to_dense()), want) <= 1e-13);
    }
    SUBCASE("replay") {
        const GaussianOp g1(20, 5, 77), g2(20, 5, 77), g3(20, 5, 78);
        CHECK(g1.to_dense() == g2.to_dense());
        CHECK(!(g1.to_dense() == g3.to_dense()));
    }
    SUBCASE("Khatri-Rao form against the dense operator") {
        const std::vector<AnyMatrix> f{oracle::random_dense(3, 2, 1), oracle::random_dense(3, 2, 2)};
        const std::vector<double> lambda{2.0, -0.5};
        const std::vector<std::size_t> dims{3, 3};
        const auto ops = gaussian_kr_ops(dims, 5, 9);
        const DenseMatrix want = oracle::multiply(oracle::gaussian_kr_matrix(ops), oracle::dense_m(f, lambda));
        CHECK(oracle::rel_error(apply_gaussian_kr(ops, f, lambda), want) <= 1e-12);
    }
    SUBCASE("isotropy: E|Ωa|² = L") {
        const std::size_t n = 30, l = 8;
        DenseMatrix a = oracle::random_dense(n, 1, 5);
        const double nrm = norm2(a.col(0));
        for (double& v : a.data()) v /= nrm;
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 2000; ++seed) {
            const DenseMatrix y = apply_gaussian(GaussianOp(n, l, seed), a);
            for (double v : y.data()) total += v * v;
        }
        CHECK(std::abs(total / 2000.0 - static_cast<double>(l)) <= 0.05 * static_cast<double>(l));
    }
}

TEST_CASE("every sketch is linear") {
    const SparseMatrix a = oracle::random_sparse(48, 5, 0.2, 1);
    const SparseMatrix b = oracle::random_sparse(48, 5, 0.2, 2);
    const DenseMatrix ab = a.to_dense() + b.to_dense();
    auto check = [&](auto&& apply) {
        const DenseMatrix lhs = apply(ab);
        const DenseMatrix rhs = apply(a.to_dense()) + apply(b.to_dense());
        CHECK(oracle::rel_error(lhs, rhs) <= 1e-12);
    };
    check([](const DenseMatrix& m) { return apply_countsketch(CountSketchOp(48, 9, HashMode::standard, 3), m); });
    check([](const DenseMatrix& m) { return apply_countsketch(CountSketchOp(48, 9, HashMode::surjective, 3), m); });
    check([](const DenseMatrix& m) { return apply_srft(SrftOp(48, 9, 3), m); });
    check([](const DenseMatrix& m) { return apply_gaussian(GaussianOp(48, 9, 3), m); });

    // Multilinear sketches are linear in each factor.
    const std::vector<double> lambda(5, 1.0);
    const DenseMatrix c = oracle::random_dense(6, 5, 4);
    const DenseMatrix d1 = oracle::random_dense(8, 5, 5), d2 = oracle::random_dense(8, 5, 6);
    const TensorSketchOp t({8, 6}, 7, 2);
    const auto ops = gaussian_kr_ops(std::vector<std::size_t>{8, 6}, 7, 2);
    auto ts = [&](const DenseMatrix& first) {
        return apply_tensorsketch(t, std::vector<AnyMatrix>{first, c}, lambda);
    };
    auto gk = [&](const DenseMatrix& first) {
        return apply_gaussian_kr(ops, std::vector<AnyMatrix>{first, c}, lambda);
    };
    CHECK(oracle::rel_error(ts(d1 + d2), ts(d1) + ts(d2)) <= 1e-12);
    CHECK(oracle::rel_error(gk(d1 + d2), gk(d1) + gk(d2)) <= 1e-12);
}
