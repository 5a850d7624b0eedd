#include "sketchid/cp_tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/matrix_market.hpp"

namespace sketchid {

namespace {

constexpr double kUnitNormTol = 1e-10;

double column_norm(const AnyMatrix& a, std::size_t r) {
    if (const auto* s = std::get_if<SparseMatrix>(&a)) return norm2(s->col_values(r));
    return norm2(std::get<DenseMatrix>(a).col(r));
}

// Divides column r of every factor by `scale[r]`; a zero scale replaces the column by e_0.
AnyMatrix rescale_columns(const AnyMatrix& a, std::span<const double> scale) {
    if (const auto* s = std::get_if<SparseMatrix>(&a)) {
        std::vector<std::size_t> ptr{0};
        std::vector<std::size_t> rows;
        std::vector<double> vals;
        for (std::size_t r = 0; r < s->cols(); ++r) {
            if (scale[r] == 0.0) {
                rows.push_back(0);
                vals.push_back(1.0);
            } else {
                auto ri = s->col_rows(r);
                auto rv = s->col_values(r);
                for (std::size_t t = 0; t < ri.size(); ++t) {
                    rows.push_back(ri[t]);
                    vals.push_back(rv[t] / scale[r]);
                }
            }
            ptr.push_back(rows.size());
        }
        return SparseMatrix(s->rows(), s->cols(), std::move(ptr), std::move(rows), std::move(vals));
    }
    DenseMatrix d = std::get<DenseMatrix>(a);
    for (std::size_t r = 0; r < d.cols(); ++r) {
        auto c = d.col(r);
        if (scale[r] == 0.0) {
            std::ranges::fill(c, 0.0);
            c[0] = 1.0;
        } else {
            for (double& v : c) v /= scale[r];
        }
    }
    return d;
}

AnyMatrix select_any(const AnyMatrix& a, std::span<const std::size_t> idx) {
    return std::visit([&](const auto& m) -> AnyMatrix { return m.select_columns(idx); }, a);
}

std::vector<std::pair<std::size_t, double>> column_entries(const AnyMatrix& a, std::size_t r) {
    std::vector<std::pair<std::size_t, double>> out;
    if (const auto* s = std::get_if<SparseMatrix>(&a)) {
        auto ri = s->col_rows(r);
        auto rv = s->col_values(r);
        for (std::size_t t = 0; t < ri.size(); ++t) out.emplace_back(ri[t], rv[t]);
    } else {
        auto c = std::get<DenseMatrix>(a).col(r);
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0.0) out.emplace_back(i, c[i]);
    }
    return out;
}

std::uint64_t hash_term(std::span<const AnyMatrix> factors, std::size_t r) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    auto combine = [&h](std::uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& f : factors) {
        for (auto [i, v] : column_entries(f, r)) {
            combine(i);
            combine(std::bit_cast<std::uint64_t>(v));
        }
        combine(0xffffffffffffffffULL);
    }
    return h;
}

bool same_term(std::span<const AnyMatrix> fx, std::size_t r, std::span<const AnyMatrix> fy, std::size_t s) {
    for (std::size_t n = 0; n < fx.size(); ++n)
        if (column_entries(fx[n], r) != column_entries(fy[n], s)) return false;
    return true;
}

// [a, b(:, extra)] with a sparse result only when both inputs are sparse.
AnyMatrix append_columns(const AnyMatrix& a, const AnyMatrix& b, std::span<const std::size_t> extra) {
    const auto* sa = std::get_if<SparseMatrix>(&a);
    const auto* sb = std::get_if<SparseMatrix>(&b);
    if (sa && sb) {
        std::vector<std::size_t> ptr(sa->col_ptr().begin(), sa->col_ptr().end());
        std::vector<std::size_t> rows(sa->row_idx().begin(), sa->row_idx().end());
        std::vector<double> vals(sa->values().begin(), sa->values().end());
        for (std::size_t r : extra) {
            auto ri = sb->col_rows(r);
            auto rv = sb->col_values(r);
            rows.insert(rows.end(), ri.begin(), ri.end());
            vals.insert(vals.end(), rv.begin(), rv.end());
            ptr.push_back(rows.size());
        }
        return SparseMatrix(sa->rows(), sa->cols() + extra.size(), std::move(ptr), std::move(rows), std::move(vals));
    }
    const DenseMatrix da = to_dense(a);
    const DenseMatrix db = to_dense(b);
    DenseMatrix out(da.rows(), da.cols() + extra.size());
    for (std::size_t r = 0; r < da.cols(); ++r) std::ranges::copy(da.col(r), out.col(r).begin());
    for (std::size_t t = 0; t < extra.size(); ++t) std::ranges::copy(db.col(extra[t]), out.col(da.cols() + t).begin());
    return out;
}

double quadratic_form(const DenseMatrix& h, std::span<const double> c) {
    double total = 0.0;
    for (std::size_t s = 0; s < c.size(); ++s) {
        double acc = 0.0;
        for (std::size_t r = 0; r < c.size(); ++r) acc += h(r, s) * c[r];
        total += c[s] * acc;
    }
    return total;
}

}  // namespace

void CpTensor::validate_shapes(std::span<const double> svalues, std::span<const AnyMatrix> factors) {
    require(!factors.empty(), "CpTensor: order must be at least 1");
    const std::size_t r = svalues.size();
    require(r >= 1, "CpTensor: rank must be at least 1");
    for (std::size_t n = 0; n < factors.size(); ++n) {
        require(cols_of(factors[n]) == r, "CpTensor: factor " + std::to_string(n + 1) + " has " +
                                              std::to_string(cols_of(factors[n])) + " columns, expected " +
                                              std::to_string(r));
        require(rows_of(factors[n]) >= 1, "CpTensor: factor " + std::to_string(n + 1) + " has no rows");
        if (const auto* d = std::get_if<DenseMatrix>(&factors[n]))
            if (!d->all_finite()) throw NumericalError("CpTensor: non-finite factor entry");
    }
    for (double v : svalues)
        if (!std::isfinite(v)) throw NumericalError("CpTensor: non-finite s-value");
}

CpTensor::CpTensor(std::vector<double> svalues, std::vector<AnyMatrix> factors) {
    validate_shapes(svalues, factors);
    const std::size_t rank = svalues.size();
    std::vector<bool> zero(rank, false);
    for (auto& f : factors) {
        std::vector<double> norms(rank);
        for (std::size_t r = 0; r < rank; ++r) {
            norms[r] = column_norm(f, r);
            if (!std::isfinite(norms[r])) throw NumericalError("CpTensor: factor column norm overflows");
            if (norms[r] == 0.0) zero[r] = true;
            svalues[r] *= norms[r];
        }
        f = rescale_columns(f, norms);
    }
    // Fold negative s-values into the first factor.
    std::vector<double> flip(rank, 1.0);
    bool any_negative = false;
    for (std::size_t r = 0; r < rank; ++r) {
        if (zero[r]) {
            svalues[r] = 0.0;
            zero_terms_.push_back(r);
        } else if (svalues[r] < 0.0) {
            svalues[r] = -svalues[r];
            flip[r] = -1.0;
            any_negative = true;
        }
    }
    if (any_negative) factors[0] = rescale_columns(factors[0], flip);
    svalues_ = std::move(svalues);
    factors_ = std::move(factors);
}

CpTensor CpTensor::from_unit_factors(std::vector<double> svalues, std::vector<AnyMatrix> factors) {
    validate_shapes(svalues, factors);
    for (const auto& f : factors)
        for (std::size_t r = 0; r < svalues.size(); ++r)
            require(std::abs(column_norm(f, r) - 1.0) <= kUnitNormTol,
                    "CpTensor::from_unit_factors: factor column " + std::to_string(r) + " is not unit norm");
    CpTensor x;
    x.svalues_ = std::move(svalues);
    x.factors_ = std::move(factors);
    return x;
}

std::vector<std::size_t> CpTensor::mode_dims() const {
    std::vector<std::size_t> d;
    d.reserve(factors_.size());
    for (const auto& f : factors_) d.push_back(rows_of(f));
    return d;
}

std::size_t CpTensor::total_size() const noexcept {
    std::size_t total = 1;
    for (const auto& f : factors_) {
        const std::size_t d = rows_of(f);
        if (d != 0 && total > std::numeric_limits<std::size_t>::max() / d) return std::numeric_limits<std::size_t>::max();
        total *= d;
    }
    return total;
}

CpTensor CpTensor::select_terms(std::span<const std::size_t> idx, std::vector<double> svalues) const {
    require(idx.size() == svalues.size(), "CpTensor::select_terms: index and s-value counts differ");
    for (std::size_t r : idx) require(r < rank(), "CpTensor::select_terms: term index out of range");
    CpTensor x;
    x.svalues_ = std::move(svalues);
    for (const auto& f : factors_) x.factors_.push_back(select_any(f, idx));
    return x;
}

DenseMatrix factor_gram_hadamard(std::span<const AnyMatrix> factors) {
    require(!factors.empty(), "factor_gram_hadamard: no factors");
    DenseMatrix h;
    for (const auto& f : factors) {
        DenseMatrix g = std::visit([](const auto& m) { return gram(m); }, f);
        if (h.empty()) {
            h = std::move(g);
            continue;
        }
        require(g.rows() == h.rows(), "factor_gram_hadamard: factors disagree on the rank");
        auto hd = h.data();
        auto gd = g.data();
        for (std::size_t t = 0; t < hd.size(); ++t) hd[t] *= gd[t];
    }
    return h;
}

DenseMatrix gram_hadamard(const CpTensor& x) {
    DenseMatrix h = factor_gram_hadamard(x.factors());
    auto lam = x.svalues();
    for (std::size_t s = 0; s < h.cols(); ++s)
        for (std::size_t r = 0; r < h.rows(); ++r) h(r, s) *= lam[r] * lam[s];
    return h;
}

double cp_norm(const CpTensor& x) {
    return std::sqrt(std::max(0.0, quadratic_form(factor_gram_hadamard(x.factors()), x.svalues())));
}

double cp_diff_norm(const CpTensor& x, const CpTensor& y) {
    require(x.mode_dims() == y.mode_dims(), "cp_diff_norm: tensors have different shapes");
    const auto fx = x.factors();
    const auto fy = y.factors();

    std::unordered_multimap<std::uint64_t, std::size_t> index;
    for (std::size_t r = 0; r < x.rank(); ++r) index.emplace(hash_term(fx, r), r);

    std::vector<double> coef(x.svalues().begin(), x.svalues().end());
    std::vector<std::size_t> extra;
    std::vector<double> extra_coef;
    for (std::size_t s = 0; s < y.rank(); ++s) {
        auto [lo, hi] = index.equal_range(hash_term(fy, s));
        bool merged = false;
        for (auto it = lo; it != hi && !merged; ++it) {
            if (same_term(fx, it->second, fy, s)) {
                coef[it->second] -= y.svalues()[s];
                merged = true;
            }
        }
        if (!merged) {
            extra.push_back(s);
            extra_coef.push_back(-y.svalues()[s]);
        }
    }
    coef.insert(coef.end(), extra_coef.begin(), extra_coef.end());

    std::vector<AnyMatrix> combined;
    combined.reserve(fx.size());
    for (std::size_t n = 0; n < fx.size(); ++n) combined.push_back(append_columns(fx[n], fy[n], extra));
    return std::sqrt(std::max(0.0, quadratic_form(factor_gram_hadamard(combined), coef)));
}

namespace cpio {

void write(const std::filesystem::path& dir, const CpTensor& x) {
    require(x.order() >= 1, "cpio::write: empty tensor");
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["N"] = x.order();
    meta["R"] = x.rank();
    meta["dims"] = x.mode_dims();
    {
        std::ofstream out(dir / "meta.json");
        if (!out) throw ArgumentError("cpio::write: cannot write " + (dir / "meta.json").string());
        out << meta.dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "svalues.txt");
        if (!out) throw ArgumentError("cpio::write: cannot write " + (dir / "svalues.txt").string());
        out.precision(17);
        for (double v : x.svalues()) out << v << '\n';
    }
    for (std::size_t n = 0; n < x.order(); ++n) {
        const auto path = dir / ("factor_" + std::to_string(n + 1) + ".mtx");
        std::visit([&](const auto& m) { mm::write_file(path, m); }, x.factor(n));
    }
}

CpTensor read(const std::filesystem::path& dir) {
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) throw ArgumentError("cpio::read: missing " + (dir / "meta.json").string());
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("cpio::read: malformed meta.json: ") + e.what());
    }
    std::size_t order = 0;
    std::size_t rank = 0;
    std::vector<std::size_t> dims;
    try {
        order = meta.at("N").get<std::size_t>();
        rank = meta.at("R").get<std::size_t>();
        dims = meta.at("dims").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("cpio::read: meta.json: ") + e.what());
    }
    require(order >= 1 && dims.size() == order, "cpio::read: meta.json dims do not match N");

    std::ifstream sv_in(dir / "svalues.txt");
    if (!sv_in) throw ArgumentError("cpio::read: missing " + (dir / "svalues.txt").string());
    std::vector<double> svalues;
    std::string token;
    while (sv_in >> token) {
        try {
            std::size_t used = 0;
            svalues.push_back(std::stod(token, &used));
            require(used == token.size(), "cpio::read: bad s-value '" + token + "'");
        } catch (const std::logic_error&) {
            throw ArgumentError("cpio::read: bad s-value '" + token + "'");
        }
    }
    require(svalues.size() == rank, "cpio::read: svalues.txt holds " + std::to_string(svalues.size()) +
                                        " values, meta.json says R = " + std::to_string(rank));

    std::vector<AnyMatrix> factors;
    for (std::size_t n = 0; n < order; ++n) {
        AnyMatrix f = mm::read_file(dir / ("factor_" + std::to_string(n + 1) + ".mtx"));
        require(rows_of(f) == dims[n] && cols_of(f) == rank,
                "cpio::read: factor_" + std::to_string(n + 1) + ".mtx shape disagrees with meta.json");
        factors.push_back(std::move(f));
    }
    return CpTensor(std::move(svalues), std::move(factors));
}

}  // namespace cpio

}  // namespace sketchid
