#include "sketchid/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/random.hpp"

namespace sketchid {
namespace {

// Substream tags; changing them changes every realized sketch.
constexpr std::uint64_t kBucketStream = 1;
constexpr std::uint64_t kSignStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kGaussianStream = 4;

void check_rows(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual)
        throw ArgumentError(std::string(what) + ": operand has " + std::to_string(actual) + " rows, operator expects " +
                            std::to_string(expected));
}

void check_kr_operands(std::span<const std::size_t> dims, std::span<const AnyMatrix> factors,
                       std::span<const double> scale, const char* what) {
    require(!factors.empty(), std::string(what) + ": at least one factor is required");
    require(factors.size() == dims.size(), std::string(what) + ": factor count differs from operator order");
    const std::size_t r = cols_of(factors[0]);
    for (std::size_t n = 0; n < factors.size(); ++n) {
        check_rows(dims[n], rows_of(factors[n]), what);
        require(cols_of(factors[n]) == r, std::string(what) + ": factors disagree on column count");
    }
    require(scale.size() == r, std::string(what) + ": scale length must equal the column count");
}

}  // namespace

// ---------------------------------------------------------------- CountSketch

CountSketchOp::CountSketchOp(std::size_t in_dim, std::size_t out_dim, HashMode mode, std::uint64_t seed)
    : out_dim_(out_dim), mode_(mode), bucket_(in_dim), sign_(in_dim) {
    require(out_dim >= 1, "CountSketch: sketch dimension must be at least 1");
    require(out_dim <= std::numeric_limits<std::uint32_t>::max(), "CountSketch: sketch dimension too large");
    rng::SplitMix64 hash_gen(rng::derive(seed, kBucketStream));
    rng::SplitMix64 sign_gen(rng::derive(seed, kSignStream));
    if (mode == HashMode::surjective) {
        require(out_dim <= in_dim, "CountSketch: surjective mode requires L <= I");
        // h(i) = f(π(i)): f is the identity on the first L slots and iid uniform
        // on the rest; π is a uniform permutation.
        for (std::size_t i = 0; i < in_dim; ++i)
            bucket_[i] = static_cast<std::uint32_t>(i < out_dim ? i : hash_gen.below(out_dim));
        rng::shuffle(std::span<std::uint32_t>(bucket_), hash_gen);
    } else {
        for (auto& b : bucket_) b = static_cast<std::uint32_t>(hash_gen.below(out_dim));
    }
    for (auto& s : sign_) s = sign_gen.sign();
}

CountSketchOp::CountSketchOp(std::size_t out_dim, std::vector<std::uint32_t> bucket, std::vector<double> sign)
    : out_dim_(out_dim), bucket_(std::move(bucket)), sign_(std::move(sign)) {
    require(out_dim >= 1, "CountSketch: sketch dimension must be at least 1");
    require(bucket_.size() == sign_.size(), "CountSketch: bucket and sign lengths differ");
    for (auto b : bucket_) require(b < out_dim_, "CountSketch: bucket out of range");
    for (double s : sign_) require(s == 1.0 || s == -1.0, "CountSketch: signs must be +1 or -1");
    std::vector<char> hit(out_dim_, 0);
    for (auto b : bucket_) hit[b] = 1;
    mode_ = std::ranges::all_of(hit, [](char c) { return c != 0; }) ? HashMode::surjective : HashMode::standard;
}

DenseMatrix CountSketchOp::to_dense() const {
    DenseMatrix s(out_dim_, in_dim());
    for (std::size_t i = 0; i < in_dim(); ++i) s(bucket_[i], i) = sign_[i];
    return s;
}

DenseMatrix apply_countsketch(const CountSketchOp& s, const SparseMatrix& a) {
    check_rows(s.in_dim(), a.rows(), "apply_countsketch");
    const auto h = s.bucket();
    const auto d = s.sign();
    DenseMatrix y(s.out_dim(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto out = y.col(j);
        auto rows = a.col_rows(j);
        auto vals = a.col_values(j);
        for (std::size_t p = 0; p < rows.size(); ++p) out[h[rows[p]]] += d[rows[p]] * vals[p];
    }
    return y;
}

DenseMatrix apply_countsketch(const CountSketchOp& s, const DenseMatrix& a) {
    check_rows(s.in_dim(), a.rows(), "apply_countsketch");
    const auto h = s.bucket();
    const auto d = s.sign();
    DenseMatrix y(s.out_dim(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto out = y.col(j);
        auto in = a.col(j);
        for (std::size_t i = 0; i < in.size(); ++i) out[h[i]] += d[i] * in[i];
    }
    return y;
}

DenseMatrix apply_countsketch(const CountSketchOp& s, const AnyMatrix& a) {
    return std::visit([&](const auto& m) { return apply_countsketch(s, m); }, a);
}

// --------------------------------------------------------------- TensorSketch

TensorSketchOp::TensorSketchOp(std::vector<std::size_t> mode_dims, std::size_t out_dim, std::uint64_t seed)
    : out_dim_(out_dim) {
    require(!mode_dims.empty(), "TensorSketch: at least one mode is required");
    modes_.reserve(mode_dims.size());
    for (std::size_t n = 0; n < mode_dims.size(); ++n)
        modes_.emplace_back(mode_dims[n], out_dim, HashMode::standard, rng::derive(seed, n));
}

TensorSketchOp::TensorSketchOp(std::vector<CountSketchOp> modes) : modes_(std::move(modes)) {
    require(!modes_.empty(), "TensorSketch: at least one mode is required");
    out_dim_ = modes_.front().out_dim();
    for (const auto& m : modes_) require(m.out_dim() == out_dim_, "TensorSketch: modes disagree on L");
}

std::vector<std::size_t> TensorSketchOp::mode_dims() const {
    std::vector<std::size_t> dims;
    for (const auto& m : modes_) dims.push_back(m.in_dim());
    return dims;
}

std::size_t TensorSketchOp::hash(std::span<const std::size_t> index) const {
    require(index.size() == modes_.size(), "TensorSketch::hash: index tuple has wrong length");
    std::size_t h = 0;
    for (std::size_t n = 0; n < modes_.size(); ++n) h = (h + modes_[n].bucket()[index[n]]) % out_dim_;
    return h;
}

double TensorSketchOp::sign(std::span<const std::size_t> index) const {
    require(index.size() == modes_.size(), "TensorSketch::sign: index tuple has wrong length");
    double s = 1.0;
    for (std::size_t n = 0; n < modes_.size(); ++n) s *= modes_[n].sign()[index[n]];
    return s;
}

DenseMatrix TensorSketchOp::to_dense() const {
    const auto dims = mode_dims();
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    DenseMatrix t(out_dim_, total);
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t lin = 0; lin < total; ++lin) {
        t(hash(idx), lin) = sign(idx);
        for (std::size_t n = 0; n < idx.size(); ++n) {
            if (++idx[n] < dims[n]) break;
            idx[n] = 0;
        }
    }
    return t;
}

DenseMatrix apply_tensorsketch(const TensorSketchOp& t, std::span<const AnyMatrix> factors,
                               std::span<const double> scale) {
    const auto dims = t.mode_dims();
    check_kr_operands(dims, factors, scale, "apply_tensorsketch");
    const std::size_t l = t.out_dim();
    const std::size_t r = cols_of(factors[0]);
    const std::size_t half = l / 2 + 1;

    detail::RealBuffer real(l * r);
    detail::ComplexBuffer spectrum(half * r);
    detail::ComplexBuffer product(half * r);
    for (std::size_t n = 0; n < factors.size(); ++n) {
        const DenseMatrix sketched = apply_countsketch(t.modes()[n], factors[n]);
        std::ranges::copy(sketched.data(), real.get());
        detail::forward_real(l, r, real, n == 0 ? product : spectrum);
        if (n == 0) continue;
        auto* acc = product.get();
        const auto* cur = spectrum.get();
        for (std::size_t p = 0; p < half * r; ++p) {
            const double re = acc[p][0] * cur[p][0] - acc[p][1] * cur[p][1];
            const double im = acc[p][0] * cur[p][1] + acc[p][1] * cur[p][0];
            acc[p][0] = re;
            acc[p][1] = im;
        }
    }
    detail::inverse_real(l, r, product, real);

    DenseMatrix y(l, r);
    const double inv_l = 1.0 / static_cast<double>(l);
    for (std::size_t c = 0; c < r; ++c) {
        const double s = scale[c] * inv_l;
        for (std::size_t i = 0; i < l; ++i) y(i, c) = real.get()[c * l + i] * s;
    }
    return y;
}

// ----------------------------------------------------------------------- SRFT

SrftOp::SrftOp(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) : sign_(in_dim) {
    require(out_dim >= 1 && out_dim <= in_dim, "SRFT: sketch dimension must satisfy 1 <= L <= I");
    rng::SplitMix64 sign_gen(rng::derive(seed, kSignStream));
    for (auto& s : sign_) s = sign_gen.sign();
    // Partial Fisher-Yates: the first L slots are a uniform sample without replacement.
    std::vector<std::size_t> rows(in_dim);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    rng::SplitMix64 sample_gen(rng::derive(seed, kSampleStream));
    for (std::size_t i = 0; i < out_dim; ++i) {
        const auto j = i + static_cast<std::size_t>(sample_gen.below(in_dim - i));
        std::swap(rows[i], rows[j]);
    }
    rows.resize(out_dim);
    sample_rows_ = std::move(rows);
}

SrftOp::SrftOp(std::vector<double> sign, std::vector<std::size_t> sample_rows)
    : sign_(std::move(sign)), sample_rows_(std::move(sample_rows)) {
    for (double s : sign_) require(s == 1.0 || s == -1.0, "SRFT: signs must be +1 or -1");
    std::vector<char> seen(sign_.size(), 0);
    for (auto r : sample_rows_) {
        require(r < sign_.size(), "SRFT: sample row out of range");
        require(!seen[r], "SRFT: sample rows must be distinct");
        seen[r] = 1;
    }
}

namespace {

struct FourierRow {
    std::size_t freq;
    bool imag;
    double weight;
};

FourierRow fourier_row(std::size_t row, std::size_t n) {
    if (row == 0) return {0, false, 1.0};
    const std::size_t k = (row + 1) / 2;
    if (row % 2 == 1) {
        if (n % 2 == 0 && k == n / 2) return {k, false, 1.0};
        return {k, false, std::numbers::sqrt2};
    }
    return {k, true, std::numbers::sqrt2};
}

}  // namespace

DenseMatrix SrftOp::to_dense() const {
    const std::size_t n = in_dim();
    DenseMatrix f(out_dim(), n);
    for (std::size_t l = 0; l < out_dim(); ++l) {
        const auto row = fourier_row(sample_rows_[l], n);
        for (std::size_t i = 0; i < n; ++i) {
            // Reduce i·k mod n first so the angle stays accurate for large n.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((i * row.freq) % n) / static_cast<double>(n);
            const double v = row.imag ? -std::sin(angle) : std::cos(angle);
            f(l, i) = row.weight * v * sign_[i];
        }
    }
    return f;
}

DenseMatrix apply_srft(const SrftOp& s, const DenseMatrix& a) {
    check_rows(s.in_dim(), a.rows(), "apply_srft");
    const std::size_t n = a.rows();
    const std::size_t half = n / 2 + 1;
    DenseMatrix y(s.out_dim(), a.cols());
    std::vector<FourierRow> rows;
    for (auto r : s.sample_rows()) rows.push_back(fourier_row(r, n));
    const auto d = s.sign();

    const std::size_t block = std::min(kSrftColumnBlock, std::max<std::size_t>(a.cols(), 1));
    detail::RealBuffer in(n * block);
    detail::ComplexBuffer out(half * block);
    for (std::size_t first = 0; first < a.cols(); first += block) {
        const std::size_t count = std::min(block, a.cols() - first);
        for (std::size_t c = 0; c < count; ++c) {
            auto col = a.col(first + c);
            double* dst = in.get() + c * n;
            for (std::size_t i = 0; i < n; ++i) dst[i] = d[i] * col[i];
        }
        detail::forward_real(n, count, in, out);
        for (std::size_t c = 0; c < count; ++c) {
            const auto* spec = out.get() + c * half;
            for (std::size_t l = 0; l < rows.size(); ++l)
                y(l, first + c) = rows[l].weight * spec[rows[l].freq][rows[l].imag ? 1 : 0];
        }
    }
    return y;
}

DenseMatrix apply_srft(const SrftOp& s, const SparseMatrix& a) {
    check_rows(s.in_dim(), a.rows(), "apply_srft");
    DenseMatrix y(s.out_dim(), a.cols());
    for (std::size_t first = 0; first < a.cols(); first += kSrftColumnBlock) {
        const std::size_t count = std::min(kSrftColumnBlock, a.cols() - first);
        const DenseMatrix part = apply_srft(s, a.to_dense_columns(first, count));
        for (std::size_t c = 0; c < count; ++c) std::ranges::copy(part.col(c), y.col(first + c).begin());
    }
    return y;
}

DenseMatrix apply_srft(const SrftOp& s, const AnyMatrix& a) {
    return std::visit([&](const auto& m) { return apply_srft(s, m); }, a);
}

// ------------------------------------------------------------------- Gaussian

GaussianOp::GaussianOp(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed)
    : in_dim_(in_dim), out_dim_(out_dim), seed_(seed), key_(rng::derive(seed, kGaussianStream)) {
    require(out_dim >= 1, "Gaussian sketch: sketch dimension must be at least 1");
}

void GaussianOp::column(std::size_t i, std::span<double> out) const {
    require(i < in_dim_ && out.size() == out_dim_, "GaussianOp::column: bad index or output length");
    rng::gaussian_block(key_, i, out);
}

DenseMatrix GaussianOp::to_dense() const {
    DenseMatrix g(out_dim_, in_dim_);
    for (std::size_t i = 0; i < in_dim_; ++i) column(i, g.col(i));
    return g;
}

DenseMatrix apply_gaussian(const GaussianOp& g, const SparseMatrix& a) {
    check_rows(g.in_dim(), a.rows(), "apply_gaussian");
    const std::size_t l = g.out_dim();
    const auto rows = a.nonzero_rows();
    constexpr auto kAbsent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> slot(a.rows(), kAbsent);
    DenseMatrix omega(l, rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        slot[rows[k]] = k;
        g.column(rows[k], omega.col(k));
    }
    DenseMatrix y(l, a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto out = y.col(j);
        auto idx = a.col_rows(j);
        auto vals = a.col_values(j);
        for (std::size_t p = 0; p < idx.size(); ++p) {
            auto w = omega.col(slot[idx[p]]);
            const double v = vals[p];
            for (std::size_t i = 0; i < l; ++i) out[i] += v * w[i];
        }
    }
    return y;
}

DenseMatrix apply_gaussian(const GaussianOp& g, const DenseMatrix& a) {
    check_rows(g.in_dim(), a.rows(), "apply_gaussian");
    return gemm(g.to_dense(), a);
}

DenseMatrix apply_gaussian(const GaussianOp& g, const AnyMatrix& a) {
    return std::visit([&](const auto& m) { return apply_gaussian(g, m); }, a);
}

std::vector<GaussianOp> gaussian_kr_ops(std::span<const std::size_t> mode_dims, std::size_t out_dim,
                                        std::uint64_t seed) {
    std::vector<GaussianOp> ops;
    ops.reserve(mode_dims.size());
    // Mode 0 uses the seed itself so a single-mode tensor sketch matches the matrix sketch.
    for (std::size_t n = 0; n < mode_dims.size(); ++n)
        ops.emplace_back(mode_dims[n], out_dim, n == 0 ? seed : rng::derive(seed, n));
    return ops;
}

DenseMatrix apply_gaussian_kr(std::span<const GaussianOp> ops, std::span<const AnyMatrix> factors,
                              std::span<const double> scale) {
    std::vector<std::size_t> dims;
    for (const auto& op : ops) dims.push_back(op.in_dim());
    check_kr_operands(dims, factors, scale, "apply_gaussian_kr");
    for (const auto& op : ops) require(op.out_dim() == ops[0].out_dim(), "apply_gaussian_kr: operators disagree on L");

    DenseMatrix y = apply_gaussian(ops[0], factors[0]);
    for (std::size_t n = 1; n < ops.size(); ++n) {
        const DenseMatrix yn = apply_gaussian(ops[n], factors[n]);
        auto acc = y.data();
        auto cur = yn.data();
        for (std::size_t p = 0; p < acc.size(); ++p) acc[p] *= cur[p];
    }
    for (std::size_t c = 0; c < y.cols(); ++c)
        for (double& v : y.col(c)) v *= scale[c];
    return y;
}

}  // namespace sketchid
