#include "sketchid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sketchid/errors.hpp"
#include "sketchid/random.hpp"

namespace sketchid {

namespace {

constexpr double kTail = 1e-8;

// floor(expected) plus a Bernoulli draw on the fractional part, clamped to [1, n].
std::size_t entry_count(double expected, std::size_t n, rng::SplitMix64& gen) {
    const double base = std::floor(expected);
    auto count = static_cast<std::size_t>(base);
    if (gen.unit() <= expected - base) ++count;
    return std::clamp<std::size_t>(count, 1, n);
}

// Sorted distinct indices in [0, n) with Gaussian values, scaled to unit norm.
void sparse_unit_vector(std::size_t n, std::size_t count, rng::SplitMix64& gen, std::uint64_t value_key,
                        std::vector<std::size_t>& idx, std::vector<double>& val) {
    idx.clear();
    // Floyd's sampling: count distinct draws in O(count) expected time.
    for (std::size_t t = n - count; t < n; ++t) {
        const auto pick = static_cast<std::size_t>(gen.below(t + 1));
        if (std::find(idx.begin(), idx.end(), pick) == idx.end())
            idx.push_back(pick);
        else
            idx.push_back(t);
    }
    std::sort(idx.begin(), idx.end());
    val.assign(count, 0.0);
    double nrm = 0.0;
    std::uint64_t block = 0;
    do {
        rng::gaussian_block(value_key, block, val);
        nrm = 0.0;
        for (double v : val) nrm += v * v;
        nrm = std::sqrt(nrm);
        ++block;  // a zero draw is practically impossible; move on if it happens
    } while (nrm == 0.0);
    for (double& v : val) v /= nrm;
}

}  // namespace

SparseMatrix gen_synthetic_matrix(std::size_t rows, std::size_t cols, std::size_t k, double density,
                                  std::uint64_t seed) {
    require(k >= 1, "gen_synthetic_matrix: k must be at least 1");
    require(2 * k <= std::min(rows, cols), "gen_synthetic_matrix: need 2k <= min(I, R)");
    require(density > 0.0 && density <= 1.0, "gen_synthetic_matrix: density must lie in (0, 1]");
    require(density * static_cast<double>(rows) >= 4.0, "gen_synthetic_matrix: need density * I >= 4");

    const std::size_t terms = 2 * k;
    const double per_vector = std::sqrt(density / static_cast<double>(terms));
    rng::SplitMix64 gen(rng::derive(seed, 1));
    const std::uint64_t value_key = rng::derive(seed, 2);

    std::vector<Triplet> triplets;
    std::vector<std::size_t> ui, vi;
    std::vector<double> uv, vv;
    for (std::size_t t = 0; t < terms; ++t) {
        const double sigma =
            t >= k ? kTail : (k == 1 ? 1.0 : std::pow(10.0, -8.0 * static_cast<double>(t) / static_cast<double>(k - 1)));
        sparse_unit_vector(rows, entry_count(per_vector * static_cast<double>(rows), rows, gen), gen,
                           rng::derive(value_key, 2 * t), ui, uv);
        sparse_unit_vector(cols, entry_count(per_vector * static_cast<double>(cols), cols, gen), gen,
                           rng::derive(value_key, 2 * t + 1), vi, vv);
        for (std::size_t b = 0; b < vi.size(); ++b)
            for (std::size_t a = 0; a < ui.size(); ++a) triplets.push_back({ui[a], vi[b], sigma * uv[a] * vv[b]});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

CpTensor gen_synthetic_tensor(std::size_t order, std::size_t dim, std::size_t rank, std::size_t k, double density,
                              std::uint64_t seed, std::size_t decay_length) {
    require(order >= 1, "gen_synthetic_tensor: order must be at least 1");
    require(dim >= 1 && rank >= 1, "gen_synthetic_tensor: dimensions must be positive");
    require(k >= 1 && k <= rank, "gen_synthetic_tensor: need 1 <= k <= R");
    require(density > 0.0 && density <= 1.0, "gen_synthetic_tensor: density must lie in (0, 1]");
    require(density * static_cast<double>(dim) >= 1.0, "gen_synthetic_tensor: need density * I >= 1");
    const std::size_t decay = decay_length == 0 ? k : decay_length;

    std::vector<double> svalues(rank);
    for (std::size_t r = 0; r < rank; ++r)
        svalues[r] = r < decay ? std::pow(10.0, -8.0 * static_cast<double>(r) / static_cast<double>(rank)) : kTail;

    std::vector<AnyMatrix> factors;
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t n = 0; n < order; ++n) {
        const std::uint64_t mode_seed = rng::derive(seed, n);
        rng::SplitMix64 gen(rng::derive(mode_seed, 1));
        const std::uint64_t value_key = rng::derive(mode_seed, 2);
        std::vector<std::size_t> ptr{0};
        std::vector<std::size_t> rows;
        std::vector<double> values;
        for (std::size_t r = 0; r < rank; ++r) {
            sparse_unit_vector(dim, entry_count(density * static_cast<double>(dim), dim, gen), gen,
                               rng::derive(value_key, r), idx, val);
            rows.insert(rows.end(), idx.begin(), idx.end());
            values.insert(values.end(), val.begin(), val.end());
            ptr.push_back(rows.size());
        }
        factors.emplace_back(SparseMatrix(dim, rank, std::move(ptr), std::move(rows), std::move(values)));
    }
    return CpTensor(std::move(svalues), std::move(factors));
}

}  // namespace sketchid
