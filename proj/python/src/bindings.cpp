#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "steerbench/active/committee.hpp"
#include "steerbench/common/error.hpp"
#include "steerbench/corpus/corpus.hpp"
#include "steerbench/features/extract.hpp"
#include "steerbench/pipeline/cli.hpp"

namespace py = pybind11;
using namespace steerbench;
using features::FeatureSpace;
using features::FeatureVector;

namespace {

FeatureVector vector_in(const std::string& space, std::vector<double> values) {
  return FeatureVector(features::feature_space_from_string(space), std::move(values));
}

py::dict validate(const std::string& text) {
  const auto v = frontend::validate(text);
  py::list diags;
  for (const auto& d : v.diagnostics) diags.append(d.format());
  py::dict out;
  out["valid"] = v.valid;
  out["diagnostics"] = diags;
  out["canonical"] = v.valid ? py::cast(frontend::render(*v.ast)) : py::none();
  return out;
}

std::vector<double> extract(const std::string& text, const std::string& space) {
  const auto fv = features::extract(frontend::parse_valid(text), features::feature_space_from_string(space));
  return {fv.values().begin(), fv.values().end()};
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = pipeline::run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_steerbench, m) {
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("validate", &validate, py::arg("text"));
  m.def("extract", &extract, py::arg("text"), py::arg("space") = "grewe");
  m.def("dimension_names",
        [](const std::string& space) { return features::dimension_names(features::feature_space_from_string(space)); },
        py::arg("space"));
  m.def("distance",
        [](const std::string& space, std::vector<double> a, std::vector<double> b) {
          return features::distance(vector_in(space, std::move(a)), vector_in(space, std::move(b)));
        },
        py::arg("space"), py::arg("a"), py::arg("b"));
  m.def("relative_proximity",
        [](const std::string& space, std::vector<double> candidate, std::vector<double> target) {
          return features::relative_proximity(vector_in(space, std::move(candidate)),
                                              vector_in(space, std::move(target)));
        },
        py::arg("space"), py::arg("candidate"), py::arg("target"));
  m.def("tokenize", [](const std::string& text) { return corpus::tokenize(text); }, py::arg("text"));
  m.def("rewrite_identifiers",
        [](const std::string& text, std::uint64_t seed) {
          return corpus::rewrite_identifiers(corpus::SourceKernel{text}, seed).text;
        },
        py::arg("text"), py::arg("seed"));
  m.def("vote_entropy", [](const std::vector<std::size_t>& votes) { return active::vote_entropy(votes); },
        py::arg("votes"));
  m.def("run_cli", &run, py::arg("args"),
        "Runs one command-line invocation and returns (exit_code, stdout, stderr).");
}
