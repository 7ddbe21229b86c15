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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "semforge/prompts.hpp"
#include "semforge/record.hpp"

namespace semforge::repair {

enum class RepairStatus { kAccepted, kRepaired, kNeedsReprompt, kDiscarded };

std::string_view to_string(RepairStatus status);

struct RepairAction {
  enum class Kind { kFixedRootIntent, kUnwrappedOovSlot, kRemovedExtraIntent };
  Kind kind;
  std::string label;  // the label that was fixed or unwrapped

  bool operator==(const RepairAction&) const = default;
};

std::string_view to_string(RepairAction::Kind kind);

struct RepairOutcome {
  RepairStatus status = RepairStatus::kDiscarded;
  std::optional<SeqlogicalParse> parse;  // absent when discarded
  std::vector<RepairAction> actions;
  std::string reason;  // set for discarded / needs_reprompt
  std::string line;    // the raw input line, verbatim
};

// Post-processing pipeline for one generated line:
//   1. bracket/shape parse; unparseable lines are discarded
//   2. an out-of-vocabulary root intent is replaced with target_intent
//   3. non-root OOV intent nodes are unwrapped (children promoted)
//   4. OOV slot nodes are unwrapped, keeping their words
//   5. revalidation; any residual violation becomes needs_reprompt
// Token text and token order are never changed by steps 2-4. An
// in-vocabulary root intent different from target_intent is kept.
RepairOutcome repair_generated_parse(const std::string& raw_line,
                                     const std::string& target_intent,
                                     const Ontology& ontology);

// Prompt asking for a single corrected line; embeds the offending line,
// the failure reason, and the slot inventory allowed for the target
// intent. Throws PromptError(kWrongStatus) unless outcome needs reprompt.
prompts::PromptSpec build_reprompt(const RepairOutcome& outcome,
                                   const prompts::PromptSpec& original_prompt,
                                   const Ontology& ontology,
                                   const prompts::TemplateSet& templates);

struct RepairStats {
  std::uint64_t accepted = 0;
  std::uint64_t repaired = 0;
  std::uint64_t needs_reprompt = 0;
  std::uint64_t discarded = 0;
  std::uint64_t fixed_root_intent = 0;
  std::uint64_t unwrapped_oov_slot = 0;
  std::uint64_t removed_extra_intent = 0;
  std::uint64_t kept_mismatched_root = 0;  // in-vocab root != target, kept

  std::uint64_t total() const { return accepted + repaired + needs_reprompt + discarded; }
  void add(const RepairOutcome& outcome, const std::string& target_intent);
  void merge(const RepairStats& other);
  nlohmann::ordered_json to_json() const;
};

struct RepairBatchResult {
  std::vector<RepairOutcome> outcomes;  // one per input line, input order
  RepairStats stats;
};

// Per-line repair over a whole generation batch. Parallelized; outcome
// order and stats are identical for any schedule.
RepairBatchResult repair_batch(std::span<const std::string> lines,
                               const std::string& target_intent,
                               const Ontology& ontology);

RepairBatchResult repair_batch_serial(std::span<const std::string> lines,
                                      const std::string& target_intent,
                                      const Ontology& ontology);

// Accepted/repaired outcomes as dataset records (source "llm_ep_parse").
std::vector<Record> records_from_outcomes(std::span<const RepairOutcome> outcomes,
                                          const std::string& id_prefix,
                                          const std::string& domain);

}  // namespace semforge::repair
