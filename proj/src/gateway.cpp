// Copyright 2026 Semforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semforge/gateway.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

namespace semforge::llm {

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme = endpoint.find("://");
  std::size_t path_start =
      endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

std::string_view to_string(GatewayErrorKind kind) {
  switch (kind) {
    case GatewayErrorKind::kTransport: return "TransportError";
    case GatewayErrorKind::kRateLimited: return "RateLimited";
    case GatewayErrorKind::kContextOverflow: return "ContextOverflow";
    case GatewayErrorKind::kBackendRefusal: return "BackendRefusal";
    case GatewayErrorKind::kBadRequest: return "BadRequest";
  }
  return "GatewayError";
}

int estimate_tokens(std::string_view prompt) {
  return static_cast<int>((prompt.size() + 3) / 4);
}

RemoteBackend::RemoteBackend(GatewayConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw ConfigError("remote backend requires an endpoint URL");
  }
}

GenerationResponse RemoteBackend::generate(const GenerationRequest& request) {
  auto [base, path] = split_endpoint(config_.endpoint);

  nlohmann::json body = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                         {"content", request.prompt}}})},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
      {"seed", request.seed},
  };

  // One client per call: cheap, and keeps this method thread-safe.
  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto started = std::chrono::steady_clock::now();
  httplib::Result result = client.Post(path, headers, body.dump(), "application/json");
  auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();

  if (!result) {
    throw GatewayError(GatewayErrorKind::kTransport,
                       "transport failure: " + httplib::to_string(result.error()));
  }
  if (result->status == 429) {
    std::int64_t after_ms = 1000;
    if (result->has_header("Retry-After")) {
      after_ms = std::atoll(result->get_header_value("Retry-After").c_str()) * 1000;
    }
    throw GatewayError(GatewayErrorKind::kRateLimited, "rate limited", after_ms);
  }
  if (result->status >= 500) {
    throw GatewayError(GatewayErrorKind::kTransport,
                       "server error " + std::to_string(result->status));
  }
  if (result->status != 200) {
    throw GatewayError(GatewayErrorKind::kBackendRefusal,
                       "backend refused with status " + std::to_string(result->status) +
                           ": " + result->body);
  }

  GenerationResponse response;
  response.backend_id = id();
  response.latency_ms = elapsed_ms;
  try {
    nlohmann::json parsed = nlohmann::json::parse(result->body);
    response.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw GatewayError(GatewayErrorKind::kBackendRefusal,
                       std::string("malformed completion payload: ") + e.what());
  }
  response.empty_warning = response.text.empty();
  return response;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayConfig config, JsonlLogger* logger)
    : backend_(std::move(backend)), config_(std::move(config)), logger_(logger) {}

GenerationResponse Gateway::complete(const GenerationRequest& request) {
  // Fail fast: nothing reaches the backend unless the request is valid.
  if (request.prompt.empty()) {
    throw GatewayError(GatewayErrorKind::kBadRequest, "empty prompt");
  }
  if (request.temperature < 0.0 || request.temperature > 2.0) {
    throw GatewayError(GatewayErrorKind::kBadRequest, "temperature out of range [0, 2]");
  }
  if (request.max_tokens < 1) {
    throw GatewayError(GatewayErrorKind::kBadRequest, "max_tokens must be positive");
  }
  int tokens = estimate_tokens(request.prompt);
  if (tokens > config_.context_budget_tokens) {
    throw GatewayError(GatewayErrorKind::kContextOverflow,
                       "prompt of ~" + std::to_string(tokens) +
                           " tokens exceeds the context budget of " +
                           std::to_string(config_.context_budget_tokens));
  }

  for (int attempt = 0;; ++attempt) {
    try {
      return backend_->generate(request);
    } catch (const GatewayError& e) {
      bool retryable = e.kind() == GatewayErrorKind::kTransport ||
                       e.kind() == GatewayErrorKind::kRateLimited;
      if (!retryable || attempt >= config_.retry_cap) throw;
      std::int64_t wait_ms = static_cast<std::int64_t>(config_.backoff_base_ms) << attempt;
      if (e.kind() == GatewayErrorKind::kRateLimited) {
        wait_ms = std::max(wait_ms, e.after_ms());
      }
      if (logger_) {
        logger_->log("gateway_retry", {{"attempt", attempt + 1},
                                       {"wait_ms", wait_ms},
                                       {"error", std::string(to_string(e.kind()))}});
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
    }
  }
}

std::vector<GenerationResponse> Gateway::complete_batch(
    std::span<const GenerationRequest> requests) {
  std::vector<GenerationResponse> responses(requests.size());
  std::vector<std::exception_ptr> failures(requests.size());

  int workers = std::max(1, std::min<int>(config_.concurrency,
                                          static_cast<int>(requests.size())));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        responses[i] = complete(requests[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();

  // Results commit in submission order; the first failed slot wins.
  for (std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return responses;
}

}  // namespace semforge::llm
