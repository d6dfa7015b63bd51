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

// /v1 HTTP API.
//
//   POST /v1/predict   household JSON -> {car_kwh, monthly_installment_eur}
//   POST /v1/explain   household JSON -> {car_kwh, monthly_installment_eur,
//                                         trace, text}   (constrained tree)
//   GET  /v1/model     -> {kind, version, schema, format}
//
// Status codes: 400 malformed JSON, 422 invalid household, 409 explain on a
// model without traces, 404 unknown route.

#ifndef HEARTHCAST_SERVICE_HPP_
#define HEARTHCAST_SERVICE_HPP_

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/household.hpp"
#include "hearthcast/metrics.hpp"
#include "hearthcast/model.hpp"
#include "json.hpp"

namespace hearthcast {

inline constexpr std::string_view kUnitPriceEnv = "HEARTHCAST_UNIT_PRICE";

// `base` with the unit price taken from HEARTHCAST_UNIT_PRICE when set.
// Throws ConfigError when the variable is not a positive number.
PriceConfig PriceFromEnvironment(PriceConfig base = {});

// car_kwh * unit_price / 12, rounded half-up to cents.
double MonthlyInstallment(double car_kwh, const PriceConfig& price);

// Household fields named as in the CSV header. reading_days is optional.
// Throws DataError naming the offending field.
HouseholdRecord RecordFromJson(const nlohmann::json& json);
nlohmann::json RecordToJson(const HouseholdRecord& record);

// {car_kwh, monthly_installment_eur}. Shared by the CLI and /v1/predict.
nlohmann::json PredictionJson(const ForecastModel& model,
                              const HouseholdRecord& record,
                              const PriceConfig& price);
// {car_kwh, monthly_installment_eur, trace, text}.
nlohmann::json ExplanationJson(const ConstrainedTreeModel& model,
                               const HouseholdRecord& record,
                               const PriceConfig& price);

// Immutable snapshot served to requests.
struct ServeState {
  std::shared_ptr<const ForecastModel> model;
  PriceConfig price;
  std::filesystem::path model_path;
};

// Holds the current snapshot. Requests keep the snapshot they started with,
// so a reload never changes the model under an in-flight request.
class ModelHolder {
 public:
  explicit ModelHolder(std::shared_ptr<const ServeState> state);

  std::shared_ptr<const ServeState> Get() const;
  void Set(std::shared_ptr<const ServeState> state);
  // Loads state->model_path again. Keeps the old snapshot and rethrows when
  // the file does not load.
  void Reload();

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const ServeState> state_;
};

std::shared_ptr<const ServeState> LoadServeState(
    const std::filesystem::path& model_path, const PriceConfig& price);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

ApiResponse HandlePredict(const ServeState& state, std::string_view body);
ApiResponse HandleExplain(const ServeState& state, std::string_view body);
ApiResponse HandleModelInfo(const ServeState& state);

// Threaded HTTP server over a ModelHolder.
class ApiServer {
 public:
  explicit ApiServer(ModelHolder& holder);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves in a background thread. Port 0 picks a free port.
  // Returns the bound port; throws Error when binding fails.
  int Start(const std::string& host, int port);
  // Blocks until Stop().
  void Wait();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_SERVICE_HPP_
