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

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/parse.hpp"

namespace semforge::label {

class LabelerError : public Error {
 public:
  enum class Kind { kUnavailable, kInconsistentTranscript };

  LabelerError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Transcript -> parse backend. The real model is external; implementations
// here are a rule mock for offline runs and a remote HTTP client.
class PseudoLabeler {
 public:
  virtual ~PseudoLabeler() = default;

  // Returns a parse whose extract_transcript equals the input. The input
  // is expected to be normalized already.
  virtual SeqlogicalParse label(const std::string& transcript) = 0;

  virtual std::string id() const = 0;
};

// Keyword/gazetteer labeler: the top intent is decided by the first
// keyword rule (file order = priority) whose phrase occurs in the
// transcript; slots are tagged by greedy longest-match gazetteer lookup.
// Deterministic; exists so the full pipeline runs offline.
class RuleMockLabeler : public PseudoLabeler {
 public:
  struct KeywordRule {
    std::vector<std::string> phrase;  // token sequence
    std::string intent;
  };
  struct GazetteerEntry {
    std::vector<std::string> phrase;
    std::string slot;
  };

  RuleMockLabeler(std::vector<KeywordRule> keywords, std::vector<GazetteerEntry> gazetteer,
                  std::string fallback_intent);

  // Fixture format, one rule per line:
  //   FALLBACK IN:GET_EVENT
  //   KEY IN:GET_WEATHER weather
  //   GAZ SL:LOCATION san francisco
  static RuleMockLabeler from_file(const std::filesystem::path& path);

  SeqlogicalParse label(const std::string& transcript) override;
  std::string id() const override { return "rule-mock"; }

 private:
  std::vector<KeywordRule> keywords_;
  std::vector<GazetteerEntry> gazetteer_;  // sorted by phrase length desc
  std::string fallback_intent_;
};

// POSTs {"transcript": ...} and expects {"seqlogical": ...}; rejects
// responses whose parse does not spell the input transcript.
class RemoteLabeler : public PseudoLabeler {
 public:
  explicit RemoteLabeler(std::string endpoint);
  SeqlogicalParse label(const std::string& transcript) override;
  std::string id() const override { return "remote:" + endpoint_; }

 private:
  std::string endpoint_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Fraction of items whose parse's top intent equals the desired intent.
double intent_match_accuracy(
    std::span<const std::pair<std::string, SeqlogicalParse>> items);

// Same metric over (desired, top_intent) label pairs.
double intent_match_accuracy_labels(
    std::span<const std::pair<std::string, std::string>> items);

}  // namespace semforge::label
