#include "sketchid/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sketchid/errors.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/matrix_id.hpp"
#include "sketchid/norm_estimate.hpp"
#include "sketchid/random.hpp"
#include "sketchid/synthetic.hpp"
#include "sketchid/tensor_id.hpp"

namespace sketchid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kInstanceStream = 0x696e7374;  // per-size generator seeds
constexpr std::uint64_t kTrialStream = 0x7472696c;     // per-trial sketch seeds
constexpr std::uint64_t kEstimatorStream = 7;

std::string_view kind_name(ExperimentKind k) { return k == ExperimentKind::matrix ? "matrix" : "tensor"; }

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double estimate_matrix_norm(const SparseMatrix& a, std::size_t iters, std::size_t probes, std::uint64_t seed) {
    return est_spectral_norm([&](std::span<const double> x) { return matvec(a, x); },
                             [&](std::span<const double> y) { return matvec_t(a, y); }, a.cols(), iters, probes,
                             seed)
        .value;
}

}  // namespace

void ExperimentConfig::validate() const {
    require(!sizes.empty(), "config: sizes must not be empty");
    for (std::size_t s : sizes) require(s >= 1, "config: sizes must be positive");
    require(rank >= 1, "config: R must be positive");
    require(target_rank >= 1 && target_rank <= rank, "config: need 1 <= K <= R");
    require(target_rank <= effective_sketch_rows(), "config: need K <= L");
    require(density > 0.0 && density <= 1.0, "config: density must lie in (0, 1]");
    require(trials >= 1, "config: trials must be at least 1");
    require(!methods.empty(), "config: methods must not be empty");
    for (const auto& m : methods) {
        const bool known = kind == ExperimentKind::matrix ? parse_id_method(m).has_value()
                                                          : parse_tensor_id_method(m).has_value();
        require(known, "config: method '" + m + "' is not available for kind " + std::string(kind_name(kind)));
    }
    if (kind == ExperimentKind::tensor) require(order >= 1, "config: N must be positive");
    require(norm_probes >= 1, "config: norm_probes must be at least 1");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        require(kind == "matrix" || kind == "tensor", "config: kind must be 'matrix' or 'tensor'");
        cfg.kind = kind == "matrix" ? ExperimentKind::matrix : ExperimentKind::tensor;
        cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        cfg.rank = j.at("R").get<std::size_t>();
        cfg.target_rank = j.at("K").get<std::size_t>();
        cfg.sketch_rows = j.value("L", std::size_t{0});
        cfg.density = j.value("density", cfg.density);
        cfg.methods = j.at("methods").get<std::vector<std::string>>();
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.order = j.value("N", cfg.order);
        cfg.decay_length = j.value("decay_length", cfg.decay_length);
        cfg.norm_iters = j.value("norm_iters", cfg.norm_iters);
        cfg.norm_probes = j.value("norm_probes", cfg.norm_probes);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["kind"] = kind_name(cfg.kind);
    j["sizes"] = cfg.sizes;
    j["R"] = cfg.rank;
    j["K"] = cfg.target_rank;
    j["L"] = cfg.effective_sketch_rows();
    j["density"] = cfg.density;
    j["methods"] = cfg.methods;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    if (cfg.kind == ExperimentKind::tensor) {
        j["N"] = cfg.order;
        j["decay_length"] = cfg.decay_length;
    } else {
        j["norm_iters"] = cfg.norm_iters;
        j["norm_probes"] = cfg.norm_probes;
    }
    return j;
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t size_index) noexcept {
    return rng::derive(rng::derive(master, kInstanceStream), size_index);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept {
    return rng::derive(rng::derive(master, kTrialStream), trial);
}

IdReport run_matrix_trial(const AnyMatrix& a, const std::string& method, std::size_t k, std::size_t l,
                          std::uint64_t sketch_seed, std::size_t norm_iters, std::size_t norm_probes,
                          InterpolativeDecomposition* id_out) {
    const auto m = parse_id_method(method);
    require(m.has_value(), "unknown matrix ID method '" + method + "'");
    IdReport r;
    r.kind = "matrix";
    r.method = method;
    r.size = rows_of(a);
    r.order = 2;
    r.rank = cols_of(a);
    r.target_rank = k;
    r.nnz = nnz_of(a);
    r.sketch_seed = sketch_seed;
    r.error_norm_kind = "spectral-estimated";

    InterpolativeDecomposition id;
    const auto t0 = Clock::now();
    if (*m == IdMethod::deterministic) {
        id = matrix_id(to_dense(a), k);
        r.wall_time_seconds = seconds_since(t0);
    } else {
        DenseMatrix y = sketch_for_id(*m, a, k, l, sketch_seed);
        r.sketch_time_seconds = seconds_since(t0);
        id = matrix_id(y, k);
        r.wall_time_seconds = seconds_since(t0);
        id.method = *m;
        id.sketch_rows = l;
        r.sketch_rows = l;
    }
    r.numerical_rank = id.numerical_rank;
    r.rank_deficient = id.rank_deficient;
    r.error_estimate =
        estimate_id_error(a, id, norm_iters, norm_probes, rng::derive(sketch_seed, kEstimatorStream)).value;
    if (id_out) *id_out = std::move(id);
    return r;
}

IdReport run_tensor_trial(const CpTensor& x, const std::string& method, std::size_t k, std::size_t l,
                          std::uint64_t sketch_seed, TensorIdResult* id_out) {
    const auto m = parse_tensor_id_method(method);
    require(m.has_value(), "unknown tensor ID method '" + method + "'");
    IdReport r;
    r.kind = "tensor";
    r.method = method;
    r.size = x.order() > 0 ? rows_of(x.factor(0)) : 0;
    r.order = x.order();
    r.rank = x.rank();
    r.target_rank = k;
    for (const auto& f : x.factors()) r.nnz += nnz_of(f);
    r.sketch_seed = sketch_seed;
    r.error_norm_kind = "frobenius-exact";

    TensorIdResult res;
    const auto t0 = Clock::now();
    if (*m == TensorIdMethod::gram) {
        res = gram_tensor_id(x, k);
        r.wall_time_seconds = seconds_since(t0);
    } else {
        DenseMatrix y = tensor_sketch_for_id(*m, x, k, l, sketch_seed);
        r.sketch_time_seconds = seconds_since(t0);
        res = tensor_id_from_sketch(x, y, k, *m);
        r.wall_time_seconds = seconds_since(t0);
        r.sketch_rows = l;
    }
    r.numerical_rank = res.numerical_rank;
    r.rank_deficient = res.rank_deficient;
    r.error_estimate = cp_diff_norm(x, res.reduced);
    if (id_out) *id_out = std::move(res);
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    const std::size_t l = cfg.effective_sketch_rows();

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
        const std::size_t size = cfg.sizes[si];
        const std::uint64_t data_seed = instance_seed(cfg.seed, si);
        AnyMatrix a;
        CpTensor x;
        double reference = 0.0;
        std::size_t nnz = 0;
        if (cfg.kind == ExperimentKind::matrix) {
            SparseMatrix s = gen_synthetic_matrix(size, cfg.rank, cfg.target_rank, cfg.density, data_seed);
            reference = estimate_matrix_norm(s, cfg.norm_iters, cfg.norm_probes, data_seed);
            nnz = s.nnz();
            a = std::move(s);
        } else {
            x = gen_synthetic_tensor(cfg.order, size, cfg.rank, cfg.target_rank, cfg.density, data_seed,
                                     cfg.decay_length);
            reference = cp_norm(x);
            for (const auto& f : x.factors()) nnz += nnz_of(f);
        }

        for (const auto& method : cfg.methods) {
            const std::size_t first = result.trials.size();
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                const std::uint64_t seed = trial_seed(cfg.seed, t);
                IdReport r;
                try {
                    r = cfg.kind == ExperimentKind::matrix
                            ? run_matrix_trial(a, method, cfg.target_rank, l, seed, cfg.norm_iters, cfg.norm_probes)
                            : run_tensor_trial(x, method, cfg.target_rank, l, seed);
                } catch (const std::exception& e) {
                    r.kind = kind_name(cfg.kind);
                    r.method = method;
                    r.size = size;
                    r.rank = cfg.rank;
                    r.target_rank = cfg.target_rank;
                    r.sketch_seed = seed;
                    r.error_norm_kind = cfg.kind == ExperimentKind::matrix ? "spectral-estimated" : "frobenius-exact";
                    r.error_estimate = std::numeric_limits<double>::quiet_NaN();
                    r.status = e.what();
                }
                r.order = cfg.kind == ExperimentKind::matrix ? 2 : cfg.order;
                r.density = cfg.density;
                r.nnz = nnz;
                r.trial = t;
                r.data_seed = data_seed;
                r.reference_norm = reference;
                result.trials.push_back(std::move(r));
            }

            CellSummary cell;
            cell.key = result.trials[first];
            std::vector<double> err, wall, sketch;
            for (std::size_t i = first; i < result.trials.size(); ++i) {
                const IdReport& r = result.trials[i];
                if (r.status != "ok") continue;
                err.push_back(r.error_estimate);
                wall.push_back(r.wall_time_seconds);
                sketch.push_back(r.sketch_time_seconds);
            }
            cell.successful_trials = err.size();
            cell.error_median = median(err);
            cell.error_mean = mean(err);
            cell.wall_median = median(wall);
            cell.wall_mean = mean(wall);
            cell.sketch_median = median(sketch);
            cell.sketch_mean = mean(sketch);
            result.summaries.push_back(std::move(cell));
        }
    }
    return result;
}

std::string csv_header() {
    return "row_type,kind,method,size,order,rank,target_rank,sketch_rows,density,nnz,trial,data_seed,sketch_seed,"
           "error_estimate,error_norm_kind,reference_norm,wall_time_seconds,sketch_time_seconds,numerical_rank,"
           "rank_deficient,status,error_mean,wall_time_mean,sketch_time_mean";
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
    out << csv_header() << '\n';
    auto common = [&out](const IdReport& r) {
        out << r.kind << ',' << r.method << ',' << r.size << ',' << r.order << ',' << r.rank << ',' << r.target_rank
            << ',' << r.sketch_rows << ',' << fmt(r.density) << ',' << r.nnz << ',';
    };
    std::size_t next = 0;
    for (const CellSummary& cell : result.summaries) {
        // Trial rows of this cell precede its summary row.
        for (; next < result.trials.size(); ++next) {
            const IdReport& r = result.trials[next];
            if (r.size != cell.key.size || r.method != cell.key.method) break;
            out << "trial,";
            common(r);
            out << r.trial << ',' << r.data_seed << ',' << r.sketch_seed << ',' << fmt(r.error_estimate) << ','
                << r.error_norm_kind << ',' << fmt(r.reference_norm) << ',' << fmt(r.wall_time_seconds) << ','
                << fmt(r.sketch_time_seconds) << ',' << r.numerical_rank << ',' << (r.rank_deficient ? 1 : 0) << ','
                << csv_field(r.status) << ",,,\n";
        }
        const IdReport& k = cell.key;
        const std::size_t total = result.config.trials;
        out << "summary,";
        common(k);
        out << ',' << k.data_seed << ",," << fmt(cell.error_median) << ',' << k.error_norm_kind << ','
            << fmt(k.reference_norm) << ',' << fmt(cell.wall_median) << ',' << fmt(cell.sketch_median) << ",,,"
            << (cell.successful_trials == total
                    ? std::string("ok")
                    : std::to_string(cell.successful_trials) + "/" + std::to_string(total) + " ok")
            << ',' << fmt(cell.error_mean) << ',' << fmt(cell.wall_mean) << ',' << fmt(cell.sketch_mean) << '\n';
    }
}

nlohmann::json to_json(const IdReport& r) {
    nlohmann::json j;
    j["kind"] = r.kind;
    j["method"] = r.method;
    j["size"] = r.size;
    j["order"] = r.order;
    j["rank"] = r.rank;
    j["target_rank"] = r.target_rank;
    j["sketch_rows"] = r.sketch_rows;
    j["density"] = r.density;
    j["nnz"] = r.nnz;
    j["trial"] = r.trial;
    j["data_seed"] = r.data_seed;
    j["sketch_seed"] = r.sketch_seed;
    j["error_estimate"] = r.error_estimate;
    j["error_norm_kind"] = r.error_norm_kind;
    j["reference_norm"] = r.reference_norm;
    j["wall_time_seconds"] = r.wall_time_seconds;
    j["sketch_time_seconds"] = r.sketch_time_seconds;
    j["numerical_rank"] = r.numerical_rank;
    j["rank_deficient"] = r.rank_deficient;
    j["status"] = r.status;
    return j;
}

nlohmann::json to_json(const ExperimentResult& result) {
    nlohmann::json j;
    j["config"] = to_json(result.config);
    j["trials"] = nlohmann::json::array();
    for (const auto& r : result.trials) j["trials"].push_back(to_json(r));
    j["summaries"] = nlohmann::json::array();
    for (const auto& c : result.summaries) {
        nlohmann::json s;
        s["method"] = c.key.method;
        s["size"] = c.key.size;
        s["successful_trials"] = c.successful_trials;
        s["error_median"] = c.error_median;
        s["error_mean"] = c.error_mean;
        s["wall_time_median"] = c.wall_median;
        s["wall_time_mean"] = c.wall_mean;
        s["sketch_time_median"] = c.sketch_median;
        s["sketch_time_mean"] = c.sketch_mean;
        j["summaries"].push_back(std::move(s));
    }
    return j;
}

}  // namespace sketchid
