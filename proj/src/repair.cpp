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

#include "semforge/repair.hpp"

#include <omp.h>

#include <cstdio>
#include <utility>

namespace semforge::repair {

namespace {

// Rebuilds a subtree bottom-up. A non-root OOV intent or an OOV slot
// dissolves into its (rebuilt) children; everything else is kept. Token
// order is untouched by construction.
std::vector<ParseNode> rebuild(const ParseNode& node, const Ontology& ontology,
                               std::vector<RepairAction>& actions) {
  if (node.kind == ParseNode::Kind::kToken) return {node};

  std::vector<ParseNode> rebuilt_children;
  for (const ParseNode& child : node.children) {
    for (ParseNode& piece : rebuild(child, ontology, actions)) {
      rebuilt_children.push_back(std::move(piece));
    }
  }

  bool dissolve = false;
  if (node.kind == ParseNode::Kind::kIntent && !ontology.has_intent(node.label)) {
    actions.push_back({RepairAction::Kind::kRemovedExtraIntent, node.label});
    dissolve = true;
  } else if (node.kind == ParseNode::Kind::kSlot && !ontology.has_slot(node.label)) {
    actions.push_back({RepairAction::Kind::kUnwrappedOovSlot, node.label});
    dissolve = true;
  }
  if (dissolve) return rebuilt_children;

  ParseNode kept = node;
  kept.children = std::move(rebuilt_children);
  return {std::move(kept)};
}

std::string slot_set_string(const std::set<std::string>& slots) {
  std::string out;
  for (const std::string& slot : slots) {
    if (!out.empty()) out += ", ";
    out += slot;
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string_view to_string(RepairStatus status) {
  switch (status) {
    case RepairStatus::kAccepted: return "accepted";
    case RepairStatus::kRepaired: return "repaired";
    case RepairStatus::kNeedsReprompt: return "needs_reprompt";
    case RepairStatus::kDiscarded: return "discarded";
  }
  return "unknown";
}

std::string_view to_string(RepairAction::Kind kind) {
  switch (kind) {
    case RepairAction::Kind::kFixedRootIntent: return "fixed_root_intent";
    case RepairAction::Kind::kUnwrappedOovSlot: return "unwrapped_oov_slot";
    case RepairAction::Kind::kRemovedExtraIntent: return "removed_extra_intent";
  }
  return "unknown";
}

RepairOutcome repair_generated_parse(const std::string& raw_line,
                                     const std::string& target_intent,
                                     const Ontology& ontology) {
  RepairOutcome outcome;
  outcome.line = raw_line;

  ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
  auto parsed = try_parse_seqlogical(raw_line, &error);
  if (!parsed) {
    outcome.status = RepairStatus::kDiscarded;
    outcome.reason = std::string(to_string(error.kind()));
    return outcome;
  }

  ParseNode root = parsed->root;
  if (!ontology.has_intent(root.label)) {
    outcome.actions.push_back({RepairAction::Kind::kFixedRootIntent, root.label});
    root.label = target_intent;
  }

  std::vector<ParseNode> new_children;
  for (const ParseNode& child : root.children) {
    for (ParseNode& piece : rebuild(child, ontology, outcome.actions)) {
      new_children.push_back(std::move(piece));
    }
  }
  root.children = std::move(new_children);

  // Re-serialize and reparse: unwrapping an intent can in principle push a
  // slot directly under a slot, which is not a valid tree.
  std::string canonical = serialize(root);
  auto reparsed = try_parse_seqlogical(canonical, &error);
  if (!reparsed) {
    outcome.status = RepairStatus::kNeedsReprompt;
    outcome.parse = SeqlogicalParse{std::move(root), raw_line};
    outcome.reason = "structure invalid after repair: " + std::string(to_string(error.kind()));
    return outcome;
  }

  ValidationReport report = validate_against_ontology(*reparsed, ontology);
  outcome.parse = std::move(*reparsed);
  if (!report.combination_known) {
    outcome.status = RepairStatus::kNeedsReprompt;
    outcome.reason = "unknown combination: " + top_intent(*outcome.parse) + " with slots " +
                     slot_set_string(slot_label_set(*outcome.parse));
    return outcome;
  }
  outcome.status =
      outcome.actions.empty() ? RepairStatus::kAccepted : RepairStatus::kRepaired;
  return outcome;
}

prompts::PromptSpec build_reprompt(const RepairOutcome& outcome,
                                   const prompts::PromptSpec& original_prompt,
                                   const Ontology& ontology,
                                   const prompts::TemplateSet& templates) {
  if (outcome.status != RepairStatus::kNeedsReprompt) {
    throw prompts::PromptError(prompts::PromptError::Kind::kWrongStatus,
                               "reprompt requires a needs_reprompt outcome, got " +
                                   std::string(to_string(outcome.status)));
  }
  const std::string& intent = original_prompt.target_intent;

  // Allowed inventory: the slot combination the original prompt asked for
  // when there was one, otherwise every slot the ontology combines with
  // this intent.
  std::set<std::string> allowed;
  if (original_prompt.kind == prompts::PromptKind::kEpParse) {
    allowed = original_prompt.slots;
  } else if (auto it = ontology.combinations.find(intent); it != ontology.combinations.end()) {
    for (const auto& slot_set : it->second) allowed.insert(slot_set.begin(), slot_set.end());
  }
  std::string slot_list = allowed.empty() ? "no slots" : slot_set_string(allowed);

  prompts::PromptSpec spec;
  spec.kind = prompts::PromptKind::kReprompt;
  spec.target_intent = intent;
  spec.slots = allowed;
  spec.n_requested = 1;
  spec.rendered = prompts::render_template(templates.reprompt,
                                           {
                                               {"intent", intent},
                                               {"reason", outcome.reason},
                                               {"line", outcome.line},
                                               {"slots", slot_list},
                                           });
  return spec;
}

void RepairStats::add(const RepairOutcome& outcome, const std::string& target_intent) {
  switch (outcome.status) {
    case RepairStatus::kAccepted: ++accepted; break;
    case RepairStatus::kRepaired: ++repaired; break;
    case RepairStatus::kNeedsReprompt: ++needs_reprompt; break;
    case RepairStatus::kDiscarded: ++discarded; break;
  }
  for (const RepairAction& action : outcome.actions) {
    switch (action.kind) {
      case RepairAction::Kind::kFixedRootIntent: ++fixed_root_intent; break;
      case RepairAction::Kind::kUnwrappedOovSlot: ++unwrapped_oov_slot; break;
      case RepairAction::Kind::kRemovedExtraIntent: ++removed_extra_intent; break;
    }
  }
  if (outcome.parse && top_intent(*outcome.parse) != target_intent &&
      (outcome.status == RepairStatus::kAccepted ||
       outcome.status == RepairStatus::kRepaired)) {
    ++kept_mismatched_root;
  }
}

void RepairStats::merge(const RepairStats& other) {
  accepted += other.accepted;
  repaired += other.repaired;
  needs_reprompt += other.needs_reprompt;
  discarded += other.discarded;
  fixed_root_intent += other.fixed_root_intent;
  unwrapped_oov_slot += other.unwrapped_oov_slot;
  removed_extra_intent += other.removed_extra_intent;
  kept_mismatched_root += other.kept_mismatched_root;
}

nlohmann::ordered_json RepairStats::to_json() const {
  return nlohmann::ordered_json{
      {"accepted", accepted},
      {"repaired", repaired},
      {"needs_reprompt", needs_reprompt},
      {"discarded", discarded},
      {"fixed_root_intent", fixed_root_intent},
      {"unwrapped_oov_slot", unwrapped_oov_slot},
      {"removed_extra_intent", removed_extra_intent},
      {"kept_mismatched_root", kept_mismatched_root},
  };
}

RepairBatchResult repair_batch_serial(std::span<const std::string> lines,
                                      const std::string& target_intent,
                                      const Ontology& ontology) {
  RepairBatchResult result;
  result.outcomes.reserve(lines.size());
  for (const std::string& line : lines) {
    result.outcomes.push_back(repair_generated_parse(line, target_intent, ontology));
    result.stats.add(result.outcomes.back(), target_intent);
  }
  return result;
}

RepairBatchResult repair_batch(std::span<const std::string> lines,
                               const std::string& target_intent,
                               const Ontology& ontology) {
  RepairBatchResult result;
  result.outcomes.resize(lines.size());

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(lines.size()); ++i) {
    result.outcomes[i] = repair_generated_parse(lines[i], target_intent, ontology);
  }

  for (const RepairOutcome& outcome : result.outcomes) {
    result.stats.add(outcome, target_intent);
  }
  return result;
}

std::vector<Record> records_from_outcomes(std::span<const RepairOutcome> outcomes,
                                          const std::string& id_prefix,
                                          const std::string& domain) {
  std::vector<Record> records;
  std::size_t sequence = 0;
  for (const RepairOutcome& outcome : outcomes) {
    if (outcome.status != RepairStatus::kAccepted &&
        outcome.status != RepairStatus::kRepaired) {
      continue;
    }
    Record record;
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%06zu", sequence++);
    record.id = id_prefix + suffix;
    record.domain = domain;
    record.seqlogical = serialize(*outcome.parse);
    record.transcript = extract_transcript(*outcome.parse);
    record.source = kSourceLlmEpParse;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace semforge::repair
