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

#include "semforge/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace semforge {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

[[noreturn]] void fail(const std::string& origin, int line_no, const std::string& what) {
  throw OntologyError(origin + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::optional<std::string> Ontology::domain_of(const std::string& intent) const {
  for (const auto& [domain, members] : domains) {
    if (members.count(intent)) return domain;
  }
  return std::nullopt;
}

bool Ontology::combination_known(const std::string& intent,
                                 const std::set<std::string>& slot_set) const {
  if (combinations.empty()) return true;
  auto it = combinations.find(intent);
  if (it == combinations.end()) return false;
  return it->second.count(slot_set) > 0;
}

void Ontology::check() const {
  for (const auto& [domain, members] : domains) {
    for (const auto& intent : members) {
      if (!has_intent(intent)) {
        throw OntologyError("domain " + domain + " references undeclared intent " + intent);
      }
    }
  }
  for (const auto& [intent, slot_sets] : combinations) {
    if (!has_intent(intent)) {
      throw OntologyError("combination references undeclared intent " + intent);
    }
    for (const auto& slot_set : slot_sets) {
      for (const auto& slot : slot_set) {
        if (!has_slot(slot)) {
          throw OntologyError("combination for " + intent + " references undeclared slot " + slot);
        }
      }
    }
  }
}

Ontology parse_ontology(const std::string& text, const std::string& origin) {
  Ontology ontology;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string& kind = fields[0];
    if (kind == "INTENT") {
      if (fields.size() != 2 || !is_intent_label(fields[1])) fail(origin, line_no, "expected INTENT <IN:...>");
      ontology.intents.insert(fields[1]);
    } else if (kind == "SLOT") {
      if (fields.size() != 2 || !is_slot_label(fields[1])) fail(origin, line_no, "expected SLOT <SL:...>");
      ontology.slots.insert(fields[1]);
    } else if (kind == "DOMAIN") {
      if (fields.size() < 3) fail(origin, line_no, "expected DOMAIN <name> <intent...>");
      auto& members = ontology.domains[fields[1]];
      for (std::size_t i = 2; i < fields.size(); ++i) {
        if (!is_intent_label(fields[i])) fail(origin, line_no, "bad intent label " + fields[i]);
        members.insert(fields[i]);
      }
    } else if (kind == "COMBO") {
      if (fields.size() < 2 || !is_intent_label(fields[1])) fail(origin, line_no, "expected COMBO <intent> [slot...]");
      std::set<std::string> slot_set;
      for (std::size_t i = 2; i < fields.size(); ++i) {
        if (!is_slot_label(fields[i])) fail(origin, line_no, "bad slot label " + fields[i]);
        slot_set.insert(fields[i]);
      }
      ontology.combinations[fields[1]].insert(std::move(slot_set));
    } else {
      fail(origin, line_no, "unknown record kind " + kind);
    }
  }
  ontology.check();
  return ontology;
}

Ontology load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ontology file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ontology(buffer.str(), path.filename().string());
}

std::set<std::string> slot_label_set(const SeqlogicalParse& parse) {
  std::set<std::string> slots;
  std::vector<const ParseNode*> stack{&parse.root};
  while (!stack.empty()) {
    const ParseNode* node = stack.back();
    stack.pop_back();
    if (node->kind == ParseNode::Kind::kSlot) slots.insert(node->label);
    for (const ParseNode& child : node->children) stack.push_back(&child);
  }
  return slots;
}

ValidationReport validate_against_ontology(const SeqlogicalParse& parse,
                                           const Ontology& ontology) {
  ValidationReport report;
  std::set<std::string> oov_intents;
  std::set<std::string> oov_slots;
  std::vector<const ParseNode*> stack{&parse.root};
  while (!stack.empty()) {
    const ParseNode* node = stack.back();
    stack.pop_back();
    if (node->kind == ParseNode::Kind::kIntent && !ontology.has_intent(node->label)) {
      oov_intents.insert(node->label);
    } else if (node->kind == ParseNode::Kind::kSlot && !ontology.has_slot(node->label)) {
      oov_slots.insert(node->label);
    }
    for (const ParseNode& child : node->children) stack.push_back(&child);
  }
  report.oov_intents.assign(oov_intents.begin(), oov_intents.end());
  report.oov_slots.assign(oov_slots.begin(), oov_slots.end());
  report.combination_known =
      ontology.combination_known(top_intent(parse), slot_label_set(parse));
  return report;
}

}  // namespace semforge
