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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/parse.hpp"

namespace semforge {

class OntologyError : public Error {
 public:
  using Error::Error;
};

// Intent/slot inventory plus the domain -> intents and intent -> slot-set
// maps. Immutable after construction; safe to share across threads.
struct Ontology {
  std::set<std::string> intents;
  std::set<std::string> slots;
  std::map<std::string, std::set<std::string>> domains;  // domain -> intents
  std::map<std::string, std::set<std::set<std::string>>> combinations;

  bool has_intent(const std::string& label) const { return intents.count(label) > 0; }
  bool has_slot(const std::string& label) const { return slots.count(label) > 0; }

  std::optional<std::string> domain_of(const std::string& intent) const;

  // True when (intent, slot set) was declared via a COMBO line. An ontology
  // that declares no combinations at all does not constrain combinations,
  // so the check is vacuously true there.
  bool combination_known(const std::string& intent,
                         const std::set<std::string>& slot_set) const;

  // Checks the referential invariants (combo/domain labels all declared).
  void check() const;
};

// Fixture format, one record per line, '#' starts a comment:
//   INTENT IN:GET_WEATHER
//   SLOT SL:LOCATION
//   DOMAIN weather IN:GET_WEATHER IN:GET_SUNRISE
//   COMBO IN:GET_WEATHER SL:LOCATION SL:DATE_TIME
// A COMBO line with no slots declares the empty slot set.
Ontology load_ontology(const std::filesystem::path& path);
Ontology parse_ontology(const std::string& text, const std::string& origin);

struct ValidationReport {
  std::vector<std::string> oov_intents;  // sorted, unique
  std::vector<std::string> oov_slots;    // sorted, unique
  bool combination_known = true;

  bool clean() const {
    return oov_intents.empty() && oov_slots.empty() && combination_known;
  }
};

// Reports out-of-vocabulary intent and slot labels and whether the
// (top intent, slot set) pair is a declared combination.
ValidationReport validate_against_ontology(const SeqlogicalParse& parse,
                                           const Ontology& ontology);

// All distinct slot labels in the parse.
std::set<std::string> slot_label_set(const SeqlogicalParse& parse);

}  // namespace semforge
