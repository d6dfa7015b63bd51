/*
 * Copyright 2026 The Hearthcast Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Python bindings. Records, configs and reports cross the boundary as JSON
// text; the `hearthcast` package converts them to and from dicts.

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hearthcast/bench.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/errors.hpp"
#include "hearthcast/household.hpp"
#include "hearthcast/metrics.hpp"
#include "hearthcast/model.hpp"
#include "hearthcast/monotonicity.hpp"
#include "hearthcast/service.hpp"
#include "hearthcast/synthgen.hpp"
#include "json.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace hearthcast {
namespace {

class PyModel {
 public:
  explicit PyModel(std::unique_ptr<ForecastModel> model) : model_(std::move(model)) {}

  std::string kind() const { return std::string(ModelKindName(model_->kind())); }

  double Predict(const std::string& record) const {
    return ModelPredict(model_.get(), RecordFromJson(json::parse(record)));
  }

  std::vector<double> PredictCsv(const std::string& csv) const {
    std::istringstream in(csv);
    auto ingest = IngestRecordsCsv(in);
    if (!ingest.rejections.empty()) {
      throw DataError("row " + std::to_string(ingest.rejections[0].row_number) + ": " +
                      ingest.rejections[0].reason);
    }
    std::vector<double> out;
    out.reserve(ingest.records.size());
    for (const auto& r : ingest.records) out.push_back(ModelPredict(model_.get(), r));
    return out;
  }

  std::string Explain(const std::string& record, double unit_price) const {
    const auto* tree = dynamic_cast<const ConstrainedTreeModel*>(model_.get());
    if (tree == nullptr) throw ModelError("model kind '" + kind() + "' does not explain");
    return ExplanationJson(*tree, RecordFromJson(json::parse(record)),
                           PriceConfig{unit_price})
        .dump();
  }

  std::string Audit(const std::string& csv, std::size_t n_bases, std::uint64_t seed) const {
    return AuditMonotonicity(*model_, SampleProbeGrid(ParseCsv(csv), n_bases, seed))
        .ToJson()
        .dump();
  }

  std::string ToJson() const { return SerializeModel(*model_); }
  void Save(const std::string& path) const { SaveModel(*model_, path); }

  static Dataset ParseCsv(const std::string& csv) {
    std::istringstream in(csv);
    auto ingest = IngestCsv(in);
    if (!ingest.rejections.empty()) {
      throw DataError("row " + std::to_string(ingest.rejections[0].row_number) + ": " +
                      ingest.rejections[0].reason);
    }
    return std::move(ingest.dataset);
  }

 private:
  std::unique_ptr<ForecastModel> model_;
};

PyModel Train(const std::string& kind, const std::string& csv, const std::string& config,
              std::optional<std::uint64_t> seed) {
  const auto parsed = ParseModelKind(kind);
  if (!parsed) throw ConfigError("unknown model kind '" + kind + "'");
  return PyModel(TrainModel(*parsed, PyModel::ParseCsv(csv), json::parse(config), seed));
}

std::string GenerateCsv(const std::string& config) {
  std::ostringstream out;
  WriteCsv(Generate(GeneratorConfig::FromJson(json::parse(config))).dataset, out);
  return out.str();
}

std::string Metrics(const std::vector<double>& gaps) {
  return json(ComputeMetrics(GapSeries{gaps})).dump();
}

std::string Benchmark(const std::string& spec, const std::string& out_dir) {
  BenchmarkSpec s = BenchmarkSpec::FromJson(json::parse(spec));
  s.Validate();
  const BenchmarkReport report = RunBenchmark(s);
  if (!out_dir.empty()) EmitReport(report, out_dir);
  return report.ToJson().dump();
}

}  // namespace
}  // namespace hearthcast

PYBIND11_MODULE(_hearthcast, m) {
  using namespace hearthcast;
  m.doc() = "Household electricity consumption forecasting";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", error);
  auto data = py::register_exception<DataError>(m, "DataError", error);
  py::register_exception<InsufficientWindowError>(m, "InsufficientWindowError", data);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<ModelError>(m, "ModelError", error);

  py::class_<PyModel>(m, "Model")
      .def_property_readonly("kind", &PyModel::kind)
      .def("predict_json", &PyModel::Predict, py::arg("record"))
      .def("predict_csv", &PyModel::PredictCsv, py::arg("csv"))
      .def("explain_json", &PyModel::Explain, py::arg("record"), py::arg("unit_price"))
      .def("audit_json", &PyModel::Audit, py::arg("csv"), py::arg("n_bases") = 200,
           py::arg("seed") = 0)
      .def("to_json", &PyModel::ToJson)
      .def("save", &PyModel::Save, py::arg("path"));

  m.def("train", &Train, py::arg("kind"), py::arg("csv"), py::arg("config") = "{}",
        py::arg("seed") = py::none(), py::call_guard<py::gil_scoped_release>());
  m.def("load_model", [](const std::string& path) { return PyModel(LoadModel(path)); });
  m.def("model_from_json",
        [](const std::string& text) { return PyModel(DeserializeModel(text)); });
  m.def("generate_csv", &GenerateCsv, py::arg("config"));
  m.def("compute_metrics", &Metrics, py::arg("gaps"));
  m.def("rmsd_delta", &RmsdDelta, py::arg("rmsd_filtered"), py::arg("rmsd_baseline"));
  m.def("annualize_car", [](double kwh, int days) { return AnnualizeCar(kwh, days).kwh(); },
        py::arg("observed_kwh"), py::arg("reading_days"));
  m.def("monthly_installment",
        [](double car_kwh, double unit_price) {
          return MonthlyInstallment(car_kwh, PriceConfig{unit_price});
        },
        py::arg("car_kwh"), py::arg("unit_price") = PriceConfig{}.unit_price);
  m.def("run_benchmark", &Benchmark, py::arg("spec"), py::arg("out_dir") = "",
        py::call_guard<py::gil_scoped_release>());
  m.attr("DEFAULT_UNIT_PRICE") = PriceConfig{}.unit_price;
}
