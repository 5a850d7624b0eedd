#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sketchid/cp_tensor.hpp"
#include "sketchid/any_matrix.hpp"
#include "sketchid/matrix_id.hpp"
#include "sketchid/tensor_id.hpp"

namespace sketchid {

enum class ExperimentKind { matrix, tensor };

/// Parameters of a benchmark sweep. Matrices are I × R with target rank K;
/// tensors have order N, all modes of size I, CP rank R.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::matrix;
    std::vector<std::size_t> sizes;     // sweep over I
    std::size_t rank = 0;               // R
    std::size_t target_rank = 0;        // K
    std::size_t sketch_rows = 0;        // L; 0 means K + 10
    double density = 0.005;
    std::vector<std::string> methods;
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    std::size_t order = 5;              // N (tensors only)
    std::size_t decay_length = 0;       // tensors only; 0 means K
    std::size_t norm_iters = 10;        // matrices only
    std::size_t norm_probes = 2;

    std::size_t effective_sketch_rows() const noexcept { return sketch_rows == 0 ? target_rank + 10 : sketch_rows; }
    /// Throws ArgumentError on inconsistent fields or unknown methods.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// One decomposition of one generated instance.
struct IdReport {
    std::string kind;    // "matrix" or "tensor"
    std::string method;
    std::size_t size = 0;
    std::size_t order = 2;
    std::size_t rank = 0;
    std::size_t target_rank = 0;
    std::size_t sketch_rows = 0;  // 0 for deterministic and Gram methods
    double density = 0.0;
    std::size_t nnz = 0;
    std::size_t trial = 0;
    std::uint64_t data_seed = 0;    // generator seed of this size
    std::uint64_t sketch_seed = 0;  // seeds the sketch and, for matrices, the norm estimator
    double error_estimate = 0.0;
    std::string error_norm_kind;  // "spectral-estimated" or "frobenius-exact"
    double reference_norm = 0.0;  // estimated ‖A‖₂ or exact ‖X‖_F of the instance
    double wall_time_seconds = 0.0;
    double sketch_time_seconds = 0.0;
    std::size_t numerical_rank = 0;
    bool rank_deficient = false;
    std::string status = "ok";  // "ok" or the failure message
};

/// Median and mean over the successful trials of one (size, method) cell.
struct CellSummary {
    IdReport key;  // descriptive fields of the cell; trial-specific fields are unset
    std::size_t successful_trials = 0;
    double error_median = 0.0;
    double error_mean = 0.0;
    double wall_median = 0.0;
    double wall_mean = 0.0;
    double sketch_median = 0.0;
    double sketch_mean = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<IdReport> trials;
    std::vector<CellSummary> summaries;
};

/// Seed of the generated instance for sizes[size_index].
std::uint64_t instance_seed(std::uint64_t master, std::size_t size_index) noexcept;
/// Sketch seed of a trial; independent of method and size.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept;

/// Runs every size × method × trial. A trial that throws is recorded with its
/// message in `status` and the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Decomposes one instance and measures it; the building block of
/// run_experiment and of single-row replay. The decomposition itself is
/// stored through `id_out` when given.
IdReport run_matrix_trial(const AnyMatrix& a, const std::string& method, std::size_t k, std::size_t l,
                          std::uint64_t sketch_seed, std::size_t norm_iters, std::size_t norm_probes,
                          InterpolativeDecomposition* id_out = nullptr);
IdReport run_tensor_trial(const CpTensor& x, const std::string& method, std::size_t k, std::size_t l,
                          std::uint64_t sketch_seed, TensorIdResult* id_out = nullptr);

/// CSV with a fixed header. Trial rows carry row_type "trial"; each cell then
/// gets one "summary" row whose error and time columns hold medians and whose
/// *_mean columns hold means. Floats use 17 significant digits.
void write_csv(std::ostream& out, const ExperimentResult& result);
std::string csv_header();

nlohmann::json to_json(const IdReport& r);
nlohmann::json to_json(const ExperimentResult& result);

}  // namespace sketchid
