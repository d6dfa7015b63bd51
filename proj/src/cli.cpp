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

#include "hearthcast/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hearthcast/baseline.hpp"
#include "hearthcast/bench.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/ensemble.hpp"
#include "hearthcast/errors.hpp"
#include "hearthcast/model.hpp"
#include "hearthcast/service.hpp"
#include "hearthcast/synthgen.hpp"
#include "json.hpp"

namespace hearthcast {
namespace {

// Raised for problems the user fixes by changing the command line.
struct UsageError : Error {
  using Error::Error;
};

std::string ReadText(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), {}};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json ReadJson(const std::string& path) {
  const std::string text = ReadText(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{}: malformed JSON: {}", path, e.what()));
  }
}

void WriteText(const std::string& path, const std::string& text,
               std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(fmt::format("cannot write '{}'", path));
  file << text;
  if (!file) throw Error(fmt::format("write failed: '{}'", path));
}

PriceConfig Price() {
  try {
    return PriceFromEnvironment();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

void ReportRejections(const std::vector<RowRejection>& rejections,
                      std::ostream& err) {
  constexpr std::size_t kShown = 5;
  for (std::size_t i = 0; i < rejections.size() && i < kShown; ++i) {
    err << fmt::format("row {}: {}\n", rejections[i].row_number,
                       rejections[i].reason);
  }
  if (rejections.size() > kShown) {
    err << fmt::format("... {} rows rejected in total\n", rejections.size());
  }
}

// Records from a JSON object, a JSON array of objects, or a CSV whose header
// starts with the predictor columns. `single` is set for a lone object.
std::vector<HouseholdRecord> ReadRecords(const std::string& path, bool& single,
                                         std::ostream& err) {
  const std::string text = ReadText(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  single = false;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    nlohmann::json json;
    try {
      json = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(fmt::format("{}: malformed JSON: {}", path, e.what()));
    }
    std::vector<HouseholdRecord> records;
    if (json.is_object()) {
      single = true;
      records.push_back(RecordFromJson(json));
    } else {
      for (std::size_t i = 0; i < json.size(); ++i) {
        try {
          records.push_back(RecordFromJson(json[i]));
        } catch (const DataError& e) {
          throw DataError(fmt::format("record {}: {}", i, e.what()));
        }
      }
    }
    return records;
  }
  std::istringstream in(text);
  auto result = IngestRecordsCsv(in);
  if (!result.rejections.empty()) {
    ReportRejections(result.rejections, err);
    throw DataError(fmt::format("{}: {} invalid rows", path,
                                result.rejections.size()));
  }
  return std::move(result.records);
}

std::atomic<bool> g_reload_requested{false};
std::atomic<bool> g_stop_requested{false};

extern "C" void OnServeSignal(int signal) {
  if (signal == SIGHUP) {
    g_reload_requested = true;
  } else {
    g_stop_requested = true;
  }
}

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::string model;
  std::string input;
  std::string kind;
  // Per subcommand: CLI11 writes defaults when the option is declared.
  std::string predict_format;
  std::string explain_format;
  std::string bench_format;
  std::string host = "127.0.0.1";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  int port = 8080;
};

int Gen(const Options& o, std::ostream& out) {
  GeneratorConfig config;
  if (!o.config.empty()) {
    try {
      config = GeneratorConfig::FromJson(ReadJson(o.config));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", o.config, e.what()));
    }
  }
  if (o.seed) config.seed = *o.seed;
  if (o.n) config.n = *o.n;
  config.Validate();
  const GeneratedData data = Generate(config);
  std::ostringstream csv;
  WriteCsv(data.dataset, csv);
  WriteText(o.out, csv.str(), out);
  return kExitOk;
}

int Train(const Options& o, std::ostream& err) {
  const auto kind = ParseModelKind(o.kind);
  if (!kind) throw UsageError(fmt::format("unknown model kind '{}'", o.kind));
  nlohmann::json config = nlohmann::json::object();
  if (!o.config.empty()) config = ReadJson(o.config);
  if (!config.is_object()) throw ConfigError("model config must be an object");

  IngestResult ingest = IngestCsv(std::filesystem::path(o.data));
  if (!ingest.rejections.empty()) {
    ReportRejections(ingest.rejections, err);
    err << fmt::format("skipped {} rejected rows\n", ingest.rejections.size());
  }
  const auto model = TrainModel(*kind, ingest.dataset, config, o.seed);
  SaveModel(*model, o.out);
  return kExitOk;
}

int Predict(const Options& o, std::ostream& out, std::ostream& err) {
  const PriceConfig price = Price();
  const auto model = LoadModel(o.model);
  bool single = false;
  const auto records = ReadRecords(o.input, single, err);

  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(PredictionJson(*model, r, price));

  if (o.predict_format == "json") {
    const nlohmann::json doc = single ? rows.front() : nlohmann::json(rows);
    out << doc.dump(2) << "\n";
  } else if (o.predict_format == "csv") {
    out << "index,car_kwh,monthly_installment_eur\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << fmt::format("{},{},{:.2f}\n", i, rows[i]["car_kwh"].get<double>(),
                         rows[i]["monthly_installment_eur"].get<double>());
    }
  } else {
    for (const auto& row : rows) {
      out << fmt::format("{:.2f} kWh/year, {:.2f} EUR/month\n",
                         row["car_kwh"].get<double>(),
                         row["monthly_installment_eur"].get<double>());
    }
  }
  return kExitOk;
}

int Explain(const Options& o, std::ostream& out, std::ostream& err) {
  const PriceConfig price = Price();
  const auto model = LoadModel(o.model);
  const auto* tree = dynamic_cast<const ConstrainedTreeModel*>(model.get());
  if (tree == nullptr) {
    throw ModelError(fmt::format("model kind '{}' does not produce explanations",
                                 ModelKindName(model->kind())));
  }
  bool single = false;
  const auto records = ReadRecords(o.input, single, err);
  std::vector<nlohmann::json> rows;
  for (const auto& r : records) rows.push_back(ExplanationJson(*tree, r, price));

  if (o.explain_format == "json") {
    const nlohmann::json doc = single ? rows.front() : nlohmann::json(rows);
    out << doc.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0) out << "\n";
      out << rows[i]["text"].get<std::string>();
      out << fmt::format("monthly installment: {:.2f} EUR\n",
                         rows[i]["monthly_installment_eur"].get<double>());
    }
  }
  return kExitOk;
}

int Benchmark(const Options& o, std::ostream& out) {
  BenchmarkSpec spec;
  if (!o.config.empty()) {
    spec = BenchmarkSpec::FromJson(
        ReadJson(o.config), std::filesystem::path(o.config).parent_path());
  }
  if (o.seed) spec.seed = *o.seed;
  if (o.n) spec.generator.n = *o.n;
  spec.price = PriceFromEnvironment(spec.price);
  spec.Validate();

  const BenchmarkReport report = RunBenchmark(spec);
  const ReportFormat format = o.bench_format == "json"  ? ReportFormat::kJson
                              : o.bench_format == "csv" ? ReportFormat::kCsv
                                                  : ReportFormat::kAll;
  EmitReport(report, o.out, format);
  for (Regime regime : {Regime::kWithOutliers, Regime::kFiltered}) {
    out << fmt::format("regime {} ({})\n", RegimeId(regime), RegimeLabel(regime));
    out << MetricsTableCsv(report, regime) << "\n";
  }
  return kExitOk;
}

int Serve(const Options& o, std::ostream& out, std::ostream& err) {
  const PriceConfig price = Price();
  ModelHolder holder(LoadServeState(o.model, price));
  ApiServer server(holder);

  g_reload_requested = false;
  g_stop_requested = false;
  auto previous_hup = std::signal(SIGHUP, OnServeSignal);
  auto previous_int = std::signal(SIGINT, OnServeSignal);
  auto previous_term = std::signal(SIGTERM, OnServeSignal);

  const int port = server.Start(o.host, o.port);
  out << fmt::format("listening on http://{}:{}", o.host, port) << std::endl;
  while (!g_stop_requested) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (g_reload_requested.exchange(false)) {
      try {
        holder.Reload();
        out << "model reloaded" << std::endl;
      } catch (const Error& e) {
        err << "reload failed, keeping previous model: " << e.what()
            << std::endl;
      }
    }
  }
  server.Stop();
  std::signal(SIGHUP, previous_hup);
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Household annual consumption forecasting", "hearthcast"};
  app.require_subcommand(1);
  Options o;
  std::string seed_text;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic household CSV");
  gen->add_option("--config", o.config, "Generator config JSON");
  gen->add_option("--n", o.n, "Number of records");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* train = app.add_subcommand("train", "Fit a model on a household CSV");
  train->add_option("--data", o.data, "Training CSV")->required();
  train->add_option("--kind", o.kind, "Model kind")
      ->required()
      ->check(CLI::IsMember({"legacy", "linear_regression", "cart",
                             "random_forest", "gradient_boosting",
                             "constrained_tree"}));
  train->add_option("--config", o.config, "Model config JSON");
  train->add_option("--seed", o.seed, "Random seed");
  train->add_option("--out", o.out, "Model file")->required();

  auto* predict = app.add_subcommand("predict", "Predict annual consumption");
  predict->add_option("--model", o.model, "Model file")->required();
  predict->add_option("--input", o.input, "Records: JSON object, array or CSV")
      ->required();
  predict->add_option("--format", o.predict_format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->default_val("json");

  auto* explain = app.add_subcommand("explain", "Explain constrained-tree predictions");
  explain->add_option("--model", o.model, "Model file")->required();
  explain->add_option("--input", o.input, "Records: JSON object, array or CSV")
      ->required();
  explain->add_option("--format", o.explain_format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_val("text");

  auto* bench = app.add_subcommand("benchmark", "Run the two-regime benchmark");
  bench->add_option("--config", o.config, "Benchmark spec JSON");
  bench->add_option("--seed", o.seed, "Master seed");
  bench->add_option("--n", o.n, "Synthetic dataset size");
  bench->add_option("--out", o.out, "Report directory")->required();
  bench->add_option("--format", o.bench_format, "Files to write")
      ->check(CLI::IsMember({"json", "csv", "all"}))
      ->default_val("all");

  auto* serve = app.add_subcommand("serve", "Serve the /v1 HTTP API");
  serve->add_option("--model", o.model, "Model file")->required();
  serve->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve->add_option("--port", o.port, "Port, 0 for any free port")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return Gen(o, out);
    if (*train) return Train(o, err);
    if (*predict) return Predict(o, out, err);
    if (*explain) return Explain(o, out, err);
    if (*bench) return Benchmark(o, out);
    if (*serve) return Serve(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace hearthcast
