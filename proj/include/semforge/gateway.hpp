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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/log.hpp"
#include "semforge/prompts.hpp"

namespace semforge::llm {

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 512;
  double temperature = 0.8;
  std::uint64_t seed = 0;
};

struct GenerationResponse {
  std::string text;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  bool empty_warning = false;  // set when text is empty
};

enum class GatewayErrorKind {
  kTransport,
  kRateLimited,
  kContextOverflow,
  kBackendRefusal,
  kBadRequest,
};

std::string_view to_string(GatewayErrorKind kind);

class GatewayError : public Error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& what, std::int64_t after_ms = 0)
      : Error(what), kind_(kind), after_ms_(after_ms) {}

  GatewayErrorKind kind() const { return kind_; }
  std::int64_t after_ms() const { return after_ms_; }  // RateLimited only

 private:
  GatewayErrorKind kind_;
  std::int64_t after_ms_;
};

struct GatewayConfig {
  std::string endpoint;                            // remote only
  std::string model = "default";                   // remote only
  std::string api_key_env = "SEMFORGE_API_KEY";    // remote only
  int context_budget_tokens = 4096;
  int concurrency = 4;
  int retry_cap = 3;
  int backoff_base_ms = 100;
};

// Crude but documented: one token per 4 bytes, rounded up.
int estimate_tokens(std::string_view prompt);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
  virtual std::string id() const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic mock grammar.

struct MockParams {
  prompts::PromptKind kind = prompts::PromptKind::kIwp;
  std::string intent;                  // EP_PARSE, reprompt
  std::string intent_word;             // IWP
  std::vector<std::string> slots;      // EP_PARSE, reprompt (sorted)
  std::vector<std::string> examples;   // EP_TRANSCRIPT
  std::string offending_line;          // reprompt
  int n = 0;                           // 0 -> kind default
};

// Emits n numbered lines from a fixed grammar. Same (params, seed) gives
// identical bytes. EP_PARSE lines are well-formed with the requested
// intent and slots except on a fixed schedule: every 10th line is bad,
// cycling malformed brackets, OOV root intent, extra OOV slot, extra
// in-vocabulary slot that breaks the combination, and a nested OOV intent.
std::string mock_generate(const MockParams& params, std::uint64_t seed);

// Recognizes the toolkit's own prompt templates and answers from
// mock_generate; anything else is a BackendRefusal. Pure, thread-safe.
class MockBackend : public Backend {
 public:
  MockBackend() = default;
  GenerationResponse generate(const GenerationRequest& request) override;
  std::string id() const override { return "mock"; }
};

// JSON-over-HTTP chat-completion client (messages list, one user turn).
// The API key is read from the environment variable named in the config
// and sent as a bearer token when present.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(GatewayConfig config);
  GenerationResponse generate(const GenerationRequest& request) override;
  std::string id() const override { return "remote:" + config_.model; }

 private:
  GatewayConfig config_;
};

// ---------------------------------------------------------------------------

// Validation, retry with exponential backoff, and order-preserving batch
// submission over any Backend.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, GatewayConfig config,
          JsonlLogger* logger = nullptr);

  // Fails fast (no backend call) on an invalid request or a prompt over
  // the context budget. Transport and rate-limit failures are retried up
  // to config.retry_cap times with exponential backoff.
  GenerationResponse complete(const GenerationRequest& request);

  // Runs up to config.concurrency requests in flight; results are
  // returned in submission order regardless of completion order.
  std::vector<GenerationResponse> complete_batch(std::span<const GenerationRequest> requests);

  const GatewayConfig& config() const { return config_; }

 private:
  std::shared_ptr<Backend> backend_;
  GatewayConfig config_;
  JsonlLogger* logger_;
};

}  // namespace semforge::llm
