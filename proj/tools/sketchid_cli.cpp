// sketchid: interpolative decompositions of sparse matrices and CP tensors.
//
//   sketchid matrix-id A.mtx --rank K [--method countsketch] [--oversample 10] [--seed S] [--out id.json]
//   sketchid tensor-id cp_dir --rank K [--method tensorsketch] [--out id.json] [--out-tensor reduced_dir]
//   sketchid bench matrix|tensor --config cfg.json --out results.csv [--json results.json]
//   sketchid gen matrix|tensor ... --out PATH
//
// Exit status: 0 success, 2 invalid arguments or input, 3 numerical failure.
// Index lists in the JSON output are 0-based.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sketchid/cp_tensor.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/experiment.hpp"
#include "sketchid/linalg.hpp"
#include "sketchid/matrix_market.hpp"
#include "sketchid/norm_estimate.hpp"
#include "sketchid/synthetic.hpp"

namespace {

using namespace sketchid;
using nlohmann::json;

constexpr int kExitArgument = 2;
constexpr int kExitNumerical = 3;

json matrix_json(const DenseMatrix& p) {
    json j;
    j["rows"] = p.rows();
    j["cols"] = p.cols();
    j["layout"] = "column-major";
    j["data"] = std::vector<double>(p.data().begin(), p.data().end());
    return j;
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw ArgumentError("cannot write " + out);
    f << j.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ArgumentError("cannot write " + path);
    return f;
}

// Estimated ‖A‖₂, the scale against which the error estimate is read.
double estimated_norm(const AnyMatrix& a, std::size_t iters, std::size_t probes, std::uint64_t seed) {
    return std::visit(
        [&](const auto& m) {
            return est_spectral_norm([&](std::span<const double> x) { return matvec(m, x); },
                                     [&](std::span<const double> y) { return matvec_t(m, y); }, m.cols(), iters,
                                     probes, seed)
                .value;
        },
        a);
}

struct MatrixIdArgs {
    std::string input;
    std::size_t rank = 0;
    std::string method = "countsketch";
    std::size_t oversample = 10;
    std::uint64_t seed = 0;
    std::size_t norm_iters = 10;
    std::size_t norm_probes = 2;
    std::string out;
};

void run_matrix_id(const MatrixIdArgs& args) {
    const AnyMatrix a = mm::read_file(args.input);
    InterpolativeDecomposition id;
    const IdReport report = run_matrix_trial(a, args.method, args.rank, args.rank + args.oversample, args.seed,
                                             args.norm_iters, args.norm_probes, &id);
    json j;
    j["report"] = to_json(report);
    j["report"]["reference_norm"] = estimated_norm(a, args.norm_iters, args.norm_probes, args.seed);
    j["id"] = {{"k", id.k},
               {"index_base", 0},
               {"j", id.j},
               {"p", matrix_json(id.p)},
               {"numerical_rank", id.numerical_rank},
               {"rank_deficient", id.rank_deficient}};
    emit(j, args.out);
}

struct TensorIdArgs {
    std::string input;
    std::size_t rank = 0;
    std::string method = "tensorsketch";
    std::size_t oversample = 10;
    std::uint64_t seed = 0;
    std::string out;
    std::string out_tensor;
};

void run_tensor_id(const TensorIdArgs& args) {
    const CpTensor x = cpio::read(args.input);
    TensorIdResult res;
    const IdReport report = run_tensor_trial(x, args.method, args.rank, args.rank + args.oversample, args.seed, &res);
    json j;
    j["report"] = to_json(report);
    j["report"]["reference_norm"] = cp_norm(x);
    j["id"] = {{"k", res.j.size()},
               {"index_base", 0},
               {"j", res.j},
               {"p", matrix_json(res.p)},
               {"new_svalues", res.new_svalues},
               {"numerical_rank", res.numerical_rank},
               {"rank_deficient", res.rank_deficient}};
    emit(j, args.out);
    if (!args.out_tensor.empty()) cpio::write(args.out_tensor, res.reduced);
}

struct BenchArgs {
    std::string kind;
    std::string config;
    std::string out;
    std::string json_out;
};

void run_bench(const BenchArgs& args) {
    std::ifstream in(args.config);
    if (!in) throw ArgumentError("cannot read " + args.config);
    json cfg_json;
    try {
        in >> cfg_json;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("malformed config: ") + e.what());
    }
    if (!cfg_json.contains("kind")) cfg_json["kind"] = args.kind;
    require(cfg_json["kind"] == args.kind, "config kind '" + cfg_json["kind"].dump() + "' does not match '" +
                                               args.kind + "'");
    const ExperimentConfig cfg = config_from_json(cfg_json);
    const ExperimentResult result = run_experiment(cfg);
    auto csv = open_output(args.out);
    write_csv(csv, result);
    if (!args.json_out.empty()) emit(to_json(result), args.json_out);
    std::size_t failed = 0;
    for (const auto& r : result.trials) failed += r.status == "ok" ? 0 : 1;
    std::cerr << result.trials.size() << " trials, " << failed << " failed; wrote " << args.out << '\n';
}

struct GenArgs {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t order = 3;
    std::size_t k = 0;
    double density = 0.005;
    std::uint64_t seed = 0;
    std::size_t decay_length = 0;
    std::string out;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpolative decompositions of sparse matrices and CP tensors"};
    app.require_subcommand(1);

    MatrixIdArgs mid;
    auto* cmd_mid = app.add_subcommand("matrix-id", "Rank-K column ID of a Matrix Market file");
    cmd_mid->add_option("input", mid.input, "Matrix Market file")->required()->check(CLI::ExistingFile);
    cmd_mid->add_option("--rank,-k", mid.rank, "Target rank K")->required()->check(CLI::PositiveNumber);
    cmd_mid->add_option("--method", mid.method, "countsketch, gaussian, srft or deterministic")
        ->check(CLI::IsMember({"countsketch", "gaussian", "srft", "deterministic"}));
    cmd_mid->add_option("--oversample", mid.oversample, "Sketch rows beyond K");
    cmd_mid->add_option("--seed", mid.seed, "Sketch seed");
    cmd_mid->add_option("--norm-iters", mid.norm_iters, "Power iterations of the error estimate");
    cmd_mid->add_option("--norm-probes", mid.norm_probes, "Random starts of the error estimate")
        ->check(CLI::PositiveNumber);
    cmd_mid->add_option("--out,-o", mid.out, "JSON output (stdout if omitted)");

    TensorIdArgs tid;
    auto* cmd_tid = app.add_subcommand("tensor-id", "Rank-K tensor ID of a CP tensor directory");
    cmd_tid->add_option("input", tid.input, "CP tensor directory")->required()->check(CLI::ExistingDirectory);
    cmd_tid->add_option("--rank,-k", tid.rank, "Target rank K")->required()->check(CLI::PositiveNumber);
    cmd_tid->add_option("--method", tid.method, "tensorsketch, gaussian or gram")
        ->check(CLI::IsMember({"tensorsketch", "gaussian", "gram"}));
    cmd_tid->add_option("--oversample", tid.oversample, "Sketch rows beyond K");
    cmd_tid->add_option("--seed", tid.seed, "Sketch seed");
    cmd_tid->add_option("--out,-o", tid.out, "JSON output (stdout if omitted)");
    cmd_tid->add_option("--out-tensor", tid.out_tensor, "Directory for the reduced CP tensor");

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Run a benchmark sweep from a JSON config");
    cmd_bench->add_option("kind", bench.kind, "matrix or tensor")->required()->check(CLI::IsMember({"matrix", "tensor"}));
    cmd_bench->add_option("--config,-c", bench.config, "JSON config")->required()->check(CLI::ExistingFile);
    cmd_bench->add_option("--out,-o", bench.out, "CSV output")->required();
    cmd_bench->add_option("--json", bench.json_out, "Optional JSON output with every report");

    auto* cmd_gen = app.add_subcommand("gen", "Generate synthetic test data");
    cmd_gen->require_subcommand(1);
    GenArgs gm;
    auto* gen_matrix = cmd_gen->add_subcommand("matrix", "Sparse matrix with a decaying spectrum (Matrix Market)");
    gen_matrix->add_option("--rows", gm.rows, "I")->required()->check(CLI::PositiveNumber);
    gen_matrix->add_option("--cols", gm.cols, "R")->required()->check(CLI::PositiveNumber);
    gen_matrix->add_option("--k", gm.k, "Decay length K")->required()->check(CLI::PositiveNumber);
    gen_matrix->add_option("--density", gm.density, "Target fraction of stored entries");
    gen_matrix->add_option("--seed", gm.seed, "Generator seed");
    gen_matrix->add_option("--out,-o", gm.out, "Output .mtx")->required();
    GenArgs gt;
    gt.density = 0.01;
    auto* gen_tensor = cmd_gen->add_subcommand("tensor", "Sparse-factor CP tensor (directory format)");
    gen_tensor->add_option("--order", gt.order, "N")->check(CLI::PositiveNumber);
    gen_tensor->add_option("--dim", gt.rows, "I, the size of every mode")->required()->check(CLI::PositiveNumber);
    gen_tensor->add_option("--rank", gt.cols, "CP rank R")->required()->check(CLI::PositiveNumber);
    gen_tensor->add_option("--k", gt.k, "Target rank K")->required()->check(CLI::PositiveNumber);
    gen_tensor->add_option("--decay-length", gt.decay_length, "Terms with decaying s-values (default K)");
    gen_tensor->add_option("--density", gt.density, "Factor column density");
    gen_tensor->add_option("--seed", gt.seed, "Generator seed");
    gen_tensor->add_option("--out,-o", gt.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitArgument;
    }

    try {
        if (*cmd_mid) {
            run_matrix_id(mid);
        } else if (*cmd_tid) {
            run_tensor_id(tid);
        } else if (*cmd_bench) {
            run_bench(bench);
        } else if (*gen_matrix) {
            mm::write_file(gm.out, gen_synthetic_matrix(gm.rows, gm.cols, gm.k, gm.density, gm.seed));
        } else if (*gen_tensor) {
            cpio::write(gt.out,
                        gen_synthetic_tensor(gt.order, gt.rows, gt.cols, gt.k, gt.density, gt.seed, gt.decay_length));
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArgument;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArgument;
    }
    return 0;
}
