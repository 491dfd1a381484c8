#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csem/codec.hpp"
#include "csem/extract.hpp"
#include "csem/kernels.hpp"
#include "csem/matrix.hpp"

namespace py = pybind11;
using namespace csem;

PYBIND11_MODULE(_csem, m) {
    m.doc() = "CSE-compressed sparse constant matrices";

    auto exc_base = py::register_exception<Error>(m, "Error");
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", exc_base);
    py::register_exception<DimensionError>(m, "DimensionError", exc_base);
    py::register_exception<ConsistencyError>(m, "ConsistencyError", exc_base);
    py::register_exception<FormatError>(m, "FormatError", exc_base);
    py::register_exception<csem::OverflowError>(m, "KernelOverflowError", exc_base);

    py::class_<DenseMatrix>(m, "DenseMatrix")
        .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("rows"), py::arg("cols"))
        .def(py::init<std::uint32_t, std::uint32_t, std::vector<Weight>>(), py::arg("rows"),
             py::arg("cols"), py::arg("entries"))
        .def_static("from_rows", &DenseMatrix::from_rows, py::arg("rows"))
        .def_property_readonly("rows", &DenseMatrix::rows)
        .def_property_readonly("cols", &DenseMatrix::cols)
        .def_property_readonly("entries",
                               [](const DenseMatrix& self) { return self.entries(); })
        .def("at", &DenseMatrix::at, py::arg("row"), py::arg("col"))
        .def("nonzero_count", &DenseMatrix::nonzero_count)
        .def("to_rows",
             [](const DenseMatrix& self) {
                 std::vector<std::vector<Weight>> out(self.rows());
                 for (std::uint32_t r = 0; r < self.rows(); ++r) {
                     out[r].reserve(self.cols());
                     for (std::uint32_t c = 0; c < self.cols(); ++c) {
                         out[r].push_back(self.at(r, c));
                     }
                 }
                 return out;
             })
        .def(py::self == py::self)
        .def("__repr__", [](const DenseMatrix& self) {
            return "DenseMatrix(" + std::to_string(self.rows()) + "x" +
                   std::to_string(self.cols()) + ", nnz=" +
                   std::to_string(self.nonzero_count()) + ")";
        });

    py::class_<CsrMatrix>(m, "CsrMatrix")
        .def_readonly("cols", &CsrMatrix::cols)
        .def_readonly("values", &CsrMatrix::values)
        .def_readonly("col_index", &CsrMatrix::col_index)
        .def_readonly("row_ptr", &CsrMatrix::row_ptr)
        .def_property_readonly("rows", &CsrMatrix::rows)
        .def(py::self == py::self);

    py::class_<GenSpec>(m, "GenSpec")
        .def(py::init([](std::uint32_t rows, std::uint32_t cols, double target_alpha,
                         std::uint32_t unique_values, std::uint64_t seed) {
                 return GenSpec{rows, cols, target_alpha, unique_values, seed};
             }),
             py::arg("rows"), py::arg("cols"), py::arg("target_alpha"),
             py::arg("unique_values") = 1, py::arg("seed") = 0)
        .def_readwrite("rows", &GenSpec::rows)
        .def_readwrite("cols", &GenSpec::cols)
        .def_readwrite("target_alpha", &GenSpec::target_alpha)
        .def_readwrite("unique_values", &GenSpec::unique_values)
        .def_readwrite("seed", &GenSpec::seed);

    py::class_<CseTerm>(m, "CseTerm")
        .def_readonly("col_i", &CseTerm::col_i)
        .def_readonly("col_j", &CseTerm::col_j)
        .def_readonly("w_i", &CseTerm::w_i)
        .def_readonly("w_j", &CseTerm::w_j)
        .def_readonly("occ_rows", &CseTerm::occ_rows)
        .def("occurrences", &CseTerm::occurrences)
        .def("gain", &CseTerm::gain)
        .def(py::self == py::self);

    py::class_<CseSet>(m, "CseSet")
        .def_readonly("terms", &CseSet::terms)
        .def_readonly("total_gain", &CseSet::total_gain)
        .def(py::self == py::self);

    py::class_<ExtractConfig>(m, "ExtractConfig")
        .def(py::init([](std::uint32_t iterations, std::uint32_t attempts, std::uint64_t seed,
                         bool early_stop) {
                 return ExtractConfig{iterations, attempts, seed, early_stop};
             }),
             py::arg("iterations") = 1, py::arg("attempts") = 0, py::arg("seed") = 0,
             py::arg("early_stop") = false)
        .def_readwrite("iterations", &ExtractConfig::iterations)
        .def_readwrite("attempts", &ExtractConfig::attempts)
        .def_readwrite("seed", &ExtractConfig::seed)
        .def_readwrite("early_stop", &ExtractConfig::early_stop);

    py::class_<ExtractResult>(m, "ExtractResult")
        .def_readonly("commons", &ExtractResult::commons)
        .def_readonly("remainder", &ExtractResult::remainder);

    py::class_<CompressedMatrix>(m, "CompressedMatrix")
        .def_readonly("rows", &CompressedMatrix::rows)
        .def_readonly("cols", &CompressedMatrix::cols)
        .def_readonly("weights", &CompressedMatrix::weights)
        .def_readonly("wp", &CompressedMatrix::wp)
        .def_readonly("cse", &CompressedMatrix::cse)
        .def_readonly("cp", &CompressedMatrix::cp)
        .def_readonly("singles", &CompressedMatrix::singles)
        .def_readonly("sp", &CompressedMatrix::sp)
        .def("n_cse", &CompressedMatrix::n_cse)
        .def(py::self == py::self);

    py::class_<StorageReport>(m, "StorageReport")
        .def_readonly("s_weights", &StorageReport::s_weights)
        .def_readonly("s_cse", &StorageReport::s_cse)
        .def_readonly("s_singles", &StorageReport::s_singles)
        .def_readonly("s_total", &StorageReport::s_total)
        .def_readonly("s_csr", &StorageReport::s_csr)
        .def_readonly("gain", &StorageReport::gain)
        .def_readonly("n_cse", &StorageReport::n_cse);

    py::class_<OpStats>(m, "OpStats")
        .def_readonly("additions", &OpStats::additions)
        .def_readonly("multiplications", &OpStats::multiplications);

    py::class_<MultiplyResult>(m, "MultiplyResult")
        .def_readonly("y", &MultiplyResult::y)
        .def_readonly("ops", &MultiplyResult::ops);

    m.def("generate_dense", &generate_dense, py::arg("spec"));
    m.def("nonzero_ratio", &nonzero_ratio, py::arg("matrix"));
    m.def("quantize_linear", &quantize_linear, py::arg("values"), py::arg("levels"));
    m.def("to_csr", &to_csr, py::arg("matrix"));
    m.def("from_csr", &from_csr, py::arg("matrix"));
    m.def("csr_storage_size", &csr_storage_size, py::arg("matrix"));

    m.def(
        "extract",
        [](const DenseMatrix& matrix, const ExtractConfig& config) {
            return extract(matrix, config);
        },
        py::arg("matrix"), py::arg("config"));
    m.def("make_cse_set", &make_cse_set, py::arg("terms"));
    m.def("pair_gain", &pair_gain, py::arg("matrix"), py::arg("col_i"), py::arg("col_j"));
    m.def("eliminate_commons", &eliminate_commons, py::arg("matrix"), py::arg("commons"));

    m.def(
        "encode",
        [](const DenseMatrix& remainder, const CseSet& commons) {
            return encode(remainder, commons);
        },
        py::arg("remainder"), py::arg("commons") = CseSet{});
    m.def("decode", &decode, py::arg("compressed"));
    m.def("storage_report", &storage_report, py::arg("compressed"), py::arg("e_original"));
    m.def("crossover_predicate", &crossover_predicate, py::arg("alpha"),
          py::arg("unique_values"), py::arg("rows"), py::arg("cols"), py::arg("n_cse"),
          py::arg("gain"));

    m.def(
        "serialize",
        [](const CompressedMatrix& c) {
            const std::vector<std::uint8_t> bytes = serialize_bytes(c);
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("compressed"));
    m.def(
        "deserialize",
        [](const py::bytes& data) {
            const std::string_view view = data;
            return deserialize_bytes(std::vector<std::uint8_t>(view.begin(), view.end()));
        },
        py::arg("data"));
    m.def("save_file", &save_file, py::arg("compressed"), py::arg("path"));
    m.def("load_file", &load_file, py::arg("path"));
    m.def(
        "to_json_dict",
        [](const CompressedMatrix& c) {
            py::dict d;
            d["rows"] = c.rows;
            d["cols"] = c.cols;
            d["weights"] = c.weights;
            d["wp"] = c.wp;
            d["cse"] = c.cse;
            d["cp"] = c.cp;
            d["singles"] = c.singles;
            d["sp"] = c.sp;
            return d;
        },
        py::arg("compressed"));

    m.def("mm_dense", &mm_dense, py::arg("matrix"), py::arg("vector"));
    m.def("mm_csr", &mm_csr, py::arg("matrix"), py::arg("vector"));
    m.def("mm_compressed", &mm_compressed, py::arg("compressed"), py::arg("vector"));
}
