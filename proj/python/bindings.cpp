#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "sketchid/cp_tensor.hpp"
#include "sketchid/errors.hpp"
#include "sketchid/experiment.hpp"
#include "sketchid/matrix_id.hpp"
#include "sketchid/matrix_market.hpp"
#include "sketchid/norm_estimate.hpp"
#include "sketchid/sketch.hpp"
#include "sketchid/synthetic.hpp"
#include "sketchid/tensor_id.hpp"

namespace py = pybind11;
using namespace sketchid;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

DenseMatrix to_dense_matrix(const FArray& a) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

py::array_t<double> to_numpy(const DenseMatrix& a) {
    py::array_t<double, py::array::f_style> out({a.rows(), a.cols()});
    std::copy(a.data().begin(), a.data().end(), out.mutable_data());
    return out;
}

AnyMatrix to_any(const py::handle& obj) {
    if (py::isinstance<SparseMatrix>(obj)) return obj.cast<SparseMatrix>();
    return to_dense_matrix(py::cast<FArray>(obj));
}

template <class T>
py::array_t<T> copy_array(std::span<const T> v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::object from_any(const AnyMatrix& a) {
    if (const auto* s = std::get_if<SparseMatrix>(&a)) return py::cast(*s);
    return to_numpy(std::get<DenseMatrix>(a));
}

IdMethod id_method(const std::string& name) {
    auto m = parse_id_method(name);
    require(m.has_value(), "unknown ID method '" + name + "'");
    return *m;
}

TensorIdMethod tensor_method(const std::string& name) {
    auto m = parse_tensor_id_method(name);
    require(m.has_value(), "unknown tensor ID method '" + name + "'");
    return *m;
}

CpTensor make_cp(std::vector<double> svalues, const py::sequence& factors) {
    std::vector<AnyMatrix> f;
    for (const auto& item : factors) f.push_back(to_any(item));
    return CpTensor(std::move(svalues), std::move(f));
}

}  // namespace

PYBIND11_MODULE(_sketchid, m) {
    m.doc() = "Interpolative decompositions of sparse matrices and CP tensors";
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<SparseMatrix>(m, "SparseMatrix", "Compressed sparse column matrix")
        .def(py::init([](std::size_t rows, std::size_t cols, std::vector<std::size_t> indptr,
                         std::vector<std::size_t> indices, std::vector<double> data) {
                 return SparseMatrix(rows, cols, std::move(indptr), std::move(indices), std::move(data));
             }),
             py::arg("rows"), py::arg("cols"), py::arg("indptr"), py::arg("indices"), py::arg("data"))
        .def_property_readonly("shape", [](const SparseMatrix& a) { return py::make_tuple(a.rows(), a.cols()); })
        .def_property_readonly("nnz", &SparseMatrix::nnz)
        .def_property_readonly("indptr", [](const SparseMatrix& a) {
            return copy_array(a.col_ptr());
        })
        .def_property_readonly("indices", [](const SparseMatrix& a) {
            return copy_array(a.row_idx());
        })
        .def_property_readonly("data", [](const SparseMatrix& a) {
            return copy_array(a.values());
        })
        .def("toarray", [](const SparseMatrix& a) { return to_numpy(a.to_dense()); })
        .def("__repr__", [](const SparseMatrix& a) {
            return "<SparseMatrix " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", nnz " +
                   std::to_string(a.nnz()) + ">";
        });

    py::class_<InterpolativeDecomposition>(m, "InterpolativeDecomposition")
        .def_property_readonly("j", [](const InterpolativeDecomposition& id) { return id.j; })
        .def_property_readonly("p", [](const InterpolativeDecomposition& id) { return to_numpy(id.p); })
        .def_readonly("k", &InterpolativeDecomposition::k)
        .def_property_readonly("method", [](const InterpolativeDecomposition& id) { return std::string(to_string(id.method)); })
        .def_readonly("sketch_rows", &InterpolativeDecomposition::sketch_rows)
        .def_readonly("numerical_rank", &InterpolativeDecomposition::numerical_rank)
        .def_readonly("rank_deficient", &InterpolativeDecomposition::rank_deficient);

    m.def(
        "matrix_id",
        [](const py::object& a, std::size_t k, const std::string& method, std::size_t oversample,
           std::uint64_t seed) { return compute_id(id_method(method), to_any(a), k, k + oversample, seed); },
        py::arg("a"), py::arg("k"), py::arg("method") = "countsketch", py::arg("oversample") = 10,
        py::arg("seed") = 0, "Rank-k column ID A ~ A[:, j] @ p.");
    m.def(
        "estimate_id_error",
        [](const py::object& a, const InterpolativeDecomposition& id, std::size_t iters, std::size_t probes,
           std::uint64_t seed) { return estimate_id_error(to_any(a), id, iters, probes, seed).value; },
        py::arg("a"), py::arg("id"), py::arg("iters") = kDefaultNormIterations,
        py::arg("probes") = kDefaultNormProbes, py::arg("seed") = 0,
        "Randomized lower estimate of the spectral norm of A - A[:, j] @ p.");
    m.def(
        "estimate_spectral_norm",
        [](const py::object& obj, std::size_t iters, std::size_t probes, std::uint64_t seed) {
            const AnyMatrix a = to_any(obj);
            return std::visit(
                [&](const auto& mat) {
                    return est_spectral_norm([&](std::span<const double> x) { return matvec(mat, x); },
                                             [&](std::span<const double> y) { return matvec_t(mat, y); },
                                             mat.cols(), iters, probes, seed)
                        .value;
                },
                a);
        },
        py::arg("a"), py::arg("iters") = kDefaultNormIterations, py::arg("probes") = kDefaultNormProbes,
        py::arg("seed") = 0);

    m.def(
        "countsketch",
        [](const py::object& a, std::size_t l, std::uint64_t seed, bool surjective) {
            const AnyMatrix any = to_any(a);
            return to_numpy(apply_countsketch(
                CountSketchOp(rows_of(any), l, surjective ? HashMode::surjective : HashMode::standard, seed), any));
        },
        py::arg("a"), py::arg("l"), py::arg("seed") = 0, py::arg("surjective") = false);
    m.def(
        "srft",
        [](const py::object& a, std::size_t l, std::uint64_t seed) {
            const AnyMatrix any = to_any(a);
            return to_numpy(apply_srft(SrftOp(rows_of(any), l, seed), any));
        },
        py::arg("a"), py::arg("l"), py::arg("seed") = 0);
    m.def(
        "gaussian_sketch",
        [](const py::object& a, std::size_t l, std::uint64_t seed) {
            const AnyMatrix any = to_any(a);
            return to_numpy(apply_gaussian(GaussianOp(rows_of(any), l, seed), any));
        },
        py::arg("a"), py::arg("l"), py::arg("seed") = 0);

    py::class_<CpTensor>(m, "CpTensor", "CP tensor with unit-norm factor columns and s-values")
        .def(py::init(&make_cp), py::arg("svalues"), py::arg("factors"),
             "Normalizes factor columns into the s-values.")
        .def_property_readonly("order", &CpTensor::order)
        .def_property_readonly("rank", &CpTensor::rank)
        .def_property_readonly("shape", [](const CpTensor& x) { return py::tuple(py::cast(x.mode_dims())); })
        .def_property_readonly("svalues", [](const CpTensor& x) {
            return std::vector<double>(x.svalues().begin(), x.svalues().end());
        })
        .def_property_readonly("factors", [](const CpTensor& x) {
            py::list out;
            for (const auto& f : x.factors()) out.append(from_any(f));
            return out;
        })
        .def("norm", &cp_norm)
        .def("__repr__", [](const CpTensor& x) {
            return "<CpTensor order " + std::to_string(x.order()) + ", rank " + std::to_string(x.rank()) + ">";
        });

    py::class_<TensorIdResult>(m, "TensorIdResult")
        .def_readonly("reduced", &TensorIdResult::reduced)
        .def_readonly("j", &TensorIdResult::j)
        .def_property_readonly("p", [](const TensorIdResult& r) { return to_numpy(r.p); })
        .def_readonly("new_svalues", &TensorIdResult::new_svalues)
        .def_property_readonly("method", [](const TensorIdResult& r) { return std::string(to_string(r.method)); })
        .def_readonly("sketch_rows", &TensorIdResult::sketch_rows)
        .def_readonly("numerical_rank", &TensorIdResult::numerical_rank)
        .def_readonly("rank_deficient", &TensorIdResult::rank_deficient);

    m.def(
        "tensor_id",
        [](const CpTensor& x, std::size_t k, const std::string& method, std::size_t oversample,
           std::uint64_t seed) { return compute_tensor_id(tensor_method(method), x, k, k + oversample, seed); },
        py::arg("x"), py::arg("k"), py::arg("method") = "tensorsketch", py::arg("oversample") = 10,
        py::arg("seed") = 0, "Rank-k tensor ID keeping k of the CP terms.");
    m.def(
        "tensorsketch",
        [](const CpTensor& x, std::size_t l, std::uint64_t seed) {
            return to_numpy(apply_tensorsketch(TensorSketchOp(x.mode_dims(), l, seed), x.factors(), x.svalues()));
        },
        py::arg("x"), py::arg("l"), py::arg("seed") = 0,
        "L x R TensorSketch of the Khatri-Rao matrix of x, columns scaled by the s-values.");
    m.def("cp_norm", &cp_norm, py::arg("x"));
    m.def("cp_diff_norm", &cp_diff_norm, py::arg("x"), py::arg("y"));
    m.def("gram_hadamard", [](const CpTensor& x) { return to_numpy(gram_hadamard(x)); }, py::arg("x"));
    m.def("read_cp", &cpio::read, py::arg("path"));
    m.def("write_cp", &cpio::write, py::arg("path"), py::arg("x"));

    m.def("read_matrix_market", [](const std::filesystem::path& p) { return from_any(mm::read_file(p)); },
          py::arg("path"));
    m.def(
        "write_matrix_market",
        [](const std::filesystem::path& p, const py::object& a) {
            std::visit([&](const auto& mat) { mm::write_file(p, mat); }, to_any(a));
        },
        py::arg("path"), py::arg("a"));

    m.def("gen_synthetic_matrix", &gen_synthetic_matrix, py::arg("rows"), py::arg("cols"), py::arg("k"),
          py::arg("density") = 0.005, py::arg("seed") = 0);
    m.def("gen_synthetic_tensor", &gen_synthetic_tensor, py::arg("order"), py::arg("dim"), py::arg("rank"),
          py::arg("k"), py::arg("density") = 0.01, py::arg("seed") = 0, py::arg("decay_length") = 0);

    m.def(
        "_run_experiment_json",
        [](const std::string& config) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config);
            } catch (const nlohmann::json::exception& e) {
                throw ArgumentError(std::string("malformed config: ") + e.what());
            }
            return to_json(run_experiment(config_from_json(j))).dump();
        },
        py::arg("config"));
}
