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

#include <exception>
#include <thread>

#include "hearthcast/errors.hpp"
#include "hearthcast/service.hpp"
#include "httplib.h"

namespace hearthcast {

struct ApiServer::Impl {
  explicit Impl(ModelHolder& h) : holder(h) {}

  ModelHolder& holder;
  httplib::Server server;
  std::thread thread;
};

namespace {

void Reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json");
}

}  // namespace

ApiServer::ApiServer(ModelHolder& holder) : impl_(std::make_unique<Impl>(holder)) {
  auto& server = impl_->server;
  auto& h = impl_->holder;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Post("/v1/predict", [&h](const httplib::Request& req, httplib::Response& res) {
    Reply(res, HandlePredict(*h.Get(), req.body));
  });
  server.Post("/v1/explain", [&h](const httplib::Request& req, httplib::Response& res) {
    Reply(res, HandleExplain(*h.Get(), req.body));
  });
  server.Get("/v1/model", [&h](const httplib::Request&, httplib::Response& res) {
    Reply(res, HandleModelInfo(*h.Get()));
  });
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(nlohmann::json{{"error", "not found"}}.dump(),
                      "application/json");
    }
  });
  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        Reply(res, {500, {{"error", message}}});
      });
}

ApiServer::~ApiServer() { Stop(); }

int ApiServer::Start(const std::string& host, int port) {
  auto& server = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void ApiServer::Wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void ApiServer::Stop() {
  impl_->server.stop();
  Wait();
}

}  // namespace hearthcast
