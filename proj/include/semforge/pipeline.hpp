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
#include <filesystem>
#include <string>

#include <json.hpp>

#include "semforge/errors.hpp"
#include "semforge/gateway.hpp"
#include "semforge/log.hpp"

namespace semforge::pipeline {

// Flat key = value configuration plus CLI overrides. Relative paths in a
// config file resolve against the file's directory.
struct PipelineConfig {
  std::string mode = "ed";      // ed | nd
  std::string backend = "mock"; // mock | remote

  std::filesystem::path corpus;
  std::filesystem::path ontology;
  std::filesystem::path stopwords;
  std::filesystem::path templates_dir;
  std::filesystem::path labeler;  // rule-mock fixture
  std::filesystem::path out_dir;

  std::string labeler_backend = "mock";  // mock | remote
  std::string labeler_endpoint;

  int k_intent_words = 40;
  int n_iwp = 40;
  int n_ep = 60;
  int n_ep_parse = 30;
  int ep_examples_max = 4;
  int k_examples = 3;
  int frames_per_token = 4;
  std::uint64_t seed = 0;
  std::string repr = "jat";  // jat | tts
  std::filesystem::path tts_features_dir;
  bool dry_run = false;
  bool lenient = false;

  double temperature = 0.8;
  int max_tokens = 2048;
  llm::GatewayConfig gateway;
};

PipelineConfig load_config(const std::filesystem::path& path);

// Applies one "key=value" override; throws ConfigError on unknown keys.
void apply_override(PipelineConfig& config, const std::string& key, const std::string& value);

class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, int exit_code = 1)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)), exit_code_(exit_code) {}

  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

struct PipelineReport {
  nlohmann::ordered_json json;
};

// Existing-domain augmentation: intent-word table -> IWP + EP prompt
// schedule -> generation -> response parsing -> normalization -> dedup ->
// pseudo-labeling -> IMA -> JAT attachment -> augmented JSONL + report.
// Everything written under out_dir is a pure function of (config, seed).
PipelineReport run_ed_pipeline(const PipelineConfig& config, JsonlLogger* logger = nullptr);

// New-domain augmentation: weather holdout -> per-combination EP parse
// prompts -> generation -> repair (one reprompt round) -> transcript
// extraction + normalization consistency -> representation attachment ->
// augmented JSONL + report.
PipelineReport run_nd_pipeline(const PipelineConfig& config, JsonlLogger* logger = nullptr);

}  // namespace semforge::pipeline
