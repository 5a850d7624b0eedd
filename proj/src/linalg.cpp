#include "sketchid/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchid/errors.hpp"

namespace sketchid {
namespace {

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using MutMap = Eigen::Map<Eigen::MatrixXd>;

ConstMap view(const DenseMatrix& a) {
    return {a.data().data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())};
}
MutMap view(DenseMatrix& a) {
    return {a.data().data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())};
}

double dot(std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

PivotedQr householder(const DenseMatrix& a, std::size_t k, double rank_tol, bool pivot) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    require(k >= 1 && k <= std::min(m, n), "qr: target rank must satisfy 1 <= k <= min(rows, cols)");
    require(rank_tol >= 0.0, "qr: rank_tol must be nonnegative");
    if (!a.all_finite()) throw ArgumentError("qr: non-finite input");

    DenseMatrix w = a;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> tau(k, 0.0);

    for (std::size_t s = 0; s < k; ++s) {
        if (pivot) {
            std::size_t best = s;
            double best_norm = -1.0;
            for (std::size_t c = s; c < n; ++c) {
                const double nc = norm2(w.col(c).subspan(s));
                if (nc > best_norm || (nc == best_norm && perm[c] < perm[best])) {
                    best = c;
                    best_norm = nc;
                }
            }
            if (best != s) {
                std::swap_ranges(w.col(s).begin(), w.col(s).end(), w.col(best).begin());
                std::swap(perm[s], perm[best]);
            }
        }

        auto x = w.col(s).subspan(s);
        const double nrm = norm2(x);
        if (nrm == 0.0) continue;  // tau stays 0, reflector is the identity
        const double alpha = x[0];
        const double beta = -std::copysign(nrm, alpha);
        const double v0 = alpha - beta;
        for (std::size_t i = 1; i < x.size(); ++i) x[i] /= v0;
        x[0] = beta;
        tau[s] = (beta - alpha) / beta;

        for (std::size_t c = s + 1; c < n; ++c) {
            auto y = w.col(c).subspan(s);
            double d = y[0];
            for (std::size_t i = 1; i < y.size(); ++i) d += x[i] * y[i];
            d *= tau[s];
            y[0] -= d;
            for (std::size_t i = 1; i < y.size(); ++i) y[i] -= d * x[i];
        }
    }

    PivotedQr out;
    out.r = DenseMatrix(k, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= std::min(j, k - 1); ++i) out.r(i, j) = w(i, j);

    out.q = DenseMatrix(m, k);
    for (std::size_t c = 0; c < k; ++c) out.q(c, c) = 1.0;
    for (std::size_t s = k; s-- > 0;) {
        if (tau[s] == 0.0) continue;
        auto v = w.col(s).subspan(s);
        for (std::size_t c = s; c < k; ++c) {
            auto y = out.q.col(c).subspan(s);
            double d = y[0];
            for (std::size_t i = 1; i < y.size(); ++i) d += v[i] * y[i];
            d *= tau[s];
            y[0] -= d;
            for (std::size_t i = 1; i < y.size(); ++i) y[i] -= d * v[i];
        }
    }

    const double lead = std::abs(out.r(0, 0));
    if (lead > 0.0) {
        while (out.numerical_rank < k &&
               std::abs(out.r(out.numerical_rank, out.numerical_rank)) > rank_tol * lead)
            ++out.numerical_rank;
    }
    out.perm = std::move(perm);
    return out;
}

}  // namespace

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols() == b.rows(), "gemm: inner dimensions disagree");
    DenseMatrix out(a.rows(), b.cols());
    if (out.size() > 0 && a.cols() > 0) view(out).noalias() = view(a) * view(b);
    return out;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows() == b.rows(), "gemm_tn: inner dimensions disagree");
    DenseMatrix out(a.cols(), b.cols());
    if (out.size() > 0 && a.rows() > 0) view(out).noalias() = view(a).transpose() * view(b);
    return out;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
    require(a.cols() == b.rows(), "spmm: inner dimensions disagree");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        auto o = out.col(c);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double bj = b(j, c);
            if (bj == 0.0) continue;
            auto rows = a.col_rows(j);
            auto vals = a.col_values(j);
            for (std::size_t p = 0; p < rows.size(); ++p) o[rows[p]] += vals[p] * bj;
        }
    }
    return out;
}

DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b) {
    require(a.rows() == b.rows(), "spmm_tn: inner dimensions disagree");
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        auto bc = b.col(c);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            auto rows = a.col_rows(j);
            auto vals = a.col_values(j);
            double s = 0.0;
            for (std::size_t p = 0; p < rows.size(); ++p) s += vals[p] * bc[rows[p]];
            out(j, c) = s;
        }
    }
    return out;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto c = a.col(j);
        for (std::size_t i = 0; i < a.rows(); ++i) y[i] += c[i] * x[j];
    }
    return y;
}

std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> y) {
    require(a.rows() == y.size(), "matvec_t: dimension mismatch");
    std::vector<double> x(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] = dot(a.col(j), y);
    return x;
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto rows = a.col_rows(j);
        auto vals = a.col_values(j);
        for (std::size_t p = 0; p < rows.size(); ++p) y[rows[p]] += vals[p] * x[j];
    }
    return y;
}

std::vector<double> matvec_t(const SparseMatrix& a, std::span<const double> y) {
    require(a.rows() == y.size(), "matvec_t: dimension mismatch");
    std::vector<double> x(a.cols(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto rows = a.col_rows(j);
        auto vals = a.col_values(j);
        double s = 0.0;
        for (std::size_t p = 0; p < rows.size(); ++p) s += vals[p] * y[rows[p]];
        x[j] = s;
    }
    return x;
}

DenseMatrix gram(const DenseMatrix& a) { return gemm_tn(a, a); }

DenseMatrix gram(const SparseMatrix& a) {
    // Row-major traversal through the transpose: every stored row contributes
    // the outer product of its entries, so empty rows and disjoint columns cost nothing.
    const SparseMatrix at = a.transpose();
    const std::size_t n = a.cols();
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < at.cols(); ++i) {
        auto cols = at.col_rows(i);
        auto vals = at.col_values(i);
        for (std::size_t p = 0; p < cols.size(); ++p)
            for (std::size_t q = p; q < cols.size(); ++q) g(cols[p], cols[q]) += vals[p] * vals[q];
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) g(j, i) = g(i, j);
    return g;
}

DenseMatrix triangular_solve(const DenseMatrix& r, const DenseMatrix& b) {
    require(r.rows() == r.cols(), "triangular_solve: triangle must be square");
    require(r.rows() == b.rows(), "triangular_solve: dimension mismatch");
    const std::size_t n = r.rows();
    for (std::size_t i = 0; i < n; ++i)
        if (r(i, i) == 0.0) throw SingularError(i);
    DenseMatrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        auto xc = x.col(c);
        for (std::size_t i = n; i-- > 0;) {
            xc[i] /= r(i, i);
            const double xi = xc[i];
            auto ri = r.col(i);
            for (std::size_t p = 0; p < i; ++p) xc[p] -= ri[p] * xi;
        }
    }
    if (!x.all_finite()) throw NumericalError("triangular_solve: overflow in back substitution");
    return x;
}

PivotedQr cpqr(const DenseMatrix& a, std::size_t k, double rank_tol) { return householder(a, k, rank_tol, true); }

PivotedQr householder_qr(const DenseMatrix& a, std::size_t k, double rank_tol) {
    return householder(a, k, rank_tol, false);
}

std::vector<double> svd_values(const DenseMatrix& a) {
    require(!a.empty(), "svd_values: empty matrix");
    if (!a.all_finite()) throw ArgumentError("svd_values: non-finite input");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a));
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

}  // namespace sketchid
