#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcs/app.hpp"
#include "fcs/config.hpp"
#include "fcs/errors.hpp"

namespace py = pybind11;

namespace {

// Configs and results cross the boundary as JSON text; the Python side wraps
// them in json.loads/json.dumps.
fcs::ScenarioConfig parse(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw fcs::ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return fcs::parse_config(doc);
}

fcs::app::RunOptions options(unsigned threads, std::uint64_t seed) { return {threads, seed}; }

}  // namespace

PYBIND11_MODULE(_fcs, m) {
  m.doc() = "Full counting statistics engine (native part)";
  m.attr("__version__") = FCS_VERSION;

  auto base = py::register_exception<fcs::Error>(m, "FcsError");
  // Translators run most recent first, so subclasses are registered last.
  auto contract = py::register_exception<fcs::ContractError>(m, "ContractError", base.ptr());
  py::register_exception<fcs::ConfigError>(m, "ConfigError", contract.ptr());
  py::register_exception<fcs::IntegrityError>(m, "IntegrityError", base.ptr());

  m.def(
      "run_json",
      [](const std::string& config, unsigned threads, std::uint64_t seed) {
        const auto c = parse(config);
        py::gil_scoped_release release;
        return fcs::app::run(c, options(threads, seed)).dump();
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("seed") = 0);

  m.def(
      "oracle_check_json",
      [](const std::string& config, unsigned threads, std::uint64_t seed) {
        const auto c = parse(config);
        py::gil_scoped_release release;
        return fcs::app::oracle_check(c, options(threads, seed)).to_json().dump();
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("seed") = 0);

  m.def(
      "scan_csv",
      [](const std::string& config, const std::string& name, unsigned threads) {
        const auto c = parse(config);
        py::gil_scoped_release release;
        return fcs::app::scan_csv(c, name, options(threads, 0));
      },
      py::arg("config"), py::arg("name"), py::arg("threads") = 1);

  m.def("normalize_config_json", [](const std::string& config) { return fcs::to_json(parse(config)).dump(); },
        py::arg("config"));

  m.def("determinant", [](const fcs::Matrix& a) { return fcs::determinant(a); }, py::arg("a"));
  m.def("schatten_norm", [](const fcs::Matrix& a, double p) { return fcs::schatten_norm(a, p); },
        py::arg("a"), py::arg("p"));
}
