#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "genlab/census.hpp"
#include "genlab/runner.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string threshold_count(std::size_t k, std::int64_t n, std::int64_t T) {
  return genlab::free_group_threshold_count(k, n, T).to_json().dump();
}

std::string classify_word(const std::string& model, const std::string& word, const std::vector<std::string>& gens) {
  const auto lab = genlab::Lab::make(model, gens);
  return genlab::classify(lab->group(), lab->action(), lab->parse(word)).to_json(lab->group()).dump();
}

std::vector<std::uint64_t> ball_counts(const std::string& model, std::int64_t radius,
                                       const std::vector<std::string>& gens, unsigned workers) {
  const auto group = genlab::make_model(model);
  const auto set = gens.empty() ? genlab::GeneratingSet::standard(*group) : genlab::GeneratingSet::parse(*group, gens);
  const genlab::WordMetric metric(set);
  genlab::EnumerationOptions o;
  o.workers = workers;
  return metric.enumerate_ball(radius, false, o).ball_counts();
}

std::string effective(const std::string& config, std::optional<std::uint64_t> seed) {
  genlab::RunOverrides ov;
  ov.seed = seed;
  return genlab::effective_config(json::parse(config), ov).dump();
}

py::tuple run(const std::string& effective_config, unsigned workers, const std::string& out_dir) {
  genlab::RunResult r;
  {
    py::gil_scoped_release release;
    r = genlab::run_config(json::parse(effective_config), workers, out_dir);
  }
  return py::make_tuple(r.exit_code, r.manifest.dump());
}

}  // namespace

PYBIND11_MODULE(_genlab, m) {
  m.doc() = "Bindings for the genlab experiment library; structured results are JSON strings.";
  py::register_exception<genlab::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<genlab::UnsupportedModel>(m, "UnsupportedModel", PyExc_ValueError);
  m.def("threshold_count", &threshold_count, py::arg("k"), py::arg("n"), py::arg("T"));
  m.def("classify", &classify_word, py::arg("model"), py::arg("word"), py::arg("generators") = std::vector<std::string>{});
  m.def("ball_counts", &ball_counts, py::arg("model"), py::arg("radius"),
        py::arg("generators") = std::vector<std::string>{}, py::arg("workers") = 1u);
  m.def("effective_config", &effective, py::arg("config"), py::arg("seed") = std::nullopt);
  m.def("run", &run, py::arg("effective_config"), py::arg("workers") = 1u, py::arg("out_dir") = "");
  m.def("sha256_hex", [](const std::string& s) { return genlab::sha256_hex(s); });
  m.def("experiment_kinds", &genlab::experiment_kinds);
}
