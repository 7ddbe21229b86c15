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

#include <doctest.h>

#include <algorithm>

#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "testutil.hpp"

using namespace semforge;

namespace {

const char* kWeatherExample1 = "[IN:GET_WEATHER what kind of weather is in [SL:LOCATION paris ] ]";
const char* kWeatherExample2 = "[IN:GET_WEATHER what is the temperature at the [SL:LOCATION north pole ] ]";
const char* kWeatherExample3 = "[IN:GET_WEATHER tell me what the weather in [SL:LOCATION central park ] is like ]";

ParseErrorKind error_kind(std::string_view text) {
  ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
  auto parse = try_parse_seqlogical(text, &error);
  REQUIRE_FALSE(parse.has_value());
  return error.kind();
}

// Independent filter used as the decoupling oracle: rebuilds the tree
// keeping only tokens with a slot ancestor.
ParseNode strip_unslotted_tokens(const ParseNode& node, bool under_slot) {
  ParseNode out = node;
  out.children.clear();
  bool child_under_slot = under_slot || node.kind == ParseNode::Kind::kSlot;
  for (const ParseNode& child : node.children) {
    if (child.kind == ParseNode::Kind::kToken) {
      if (child_under_slot) out.children.push_back(child);
    } else {
      out.children.push_back(strip_unslotted_tokens(child, child_under_slot));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("label shapes") {
  CHECK(is_intent_label("IN:GET_WEATHER"));
  CHECK(is_intent_label("IN:X"));
  CHECK(is_intent_label("IN:A_1"));
  CHECK_FALSE(is_intent_label("IN:"));
  CHECK_FALSE(is_intent_label("IN:get_weather"));
  CHECK_FALSE(is_intent_label("SL:LOCATION"));
  CHECK(is_slot_label("SL:LOCATION"));
  CHECK_FALSE(is_slot_label("SL:"));
  CHECK_FALSE(is_slot_label("LOCATION"));
}

TEST_CASE("parse weather example tree") {
  SeqlogicalParse parse = parse_seqlogical(kWeatherExample1);
  CHECK(parse.root.kind == ParseNode::Kind::kIntent);
  CHECK(parse.root.label == "IN:GET_WEATHER");
  CHECK(count_token_nodes(parse.root) == 7);
  // One LOCATION slot containing the single token "paris".
  int slot_count = 0;
  for (const ParseNode& child : parse.root.children) {
    if (child.kind == ParseNode::Kind::kSlot) {
      ++slot_count;
      CHECK(child.label == "SL:LOCATION");
      REQUIRE(child.children.size() == 1);
      CHECK(child.children[0].text == "paris");
    }
  }
  CHECK(slot_count == 1);
}

TEST_CASE("parse minimal intent") {
  SeqlogicalParse parse = parse_seqlogical("[IN:X ]");
  CHECK(parse.root.label == "IN:X");
  CHECK(parse.root.children.empty());
  CHECK(serialize(parse) == "[IN:X ]");
  CHECK(extract_transcript(parse).empty());
}

TEST_CASE("whitespace between tokens and brackets is insignificant") {
  auto a = parse_seqlogical("[IN:GET_WEATHER weather [SL:LOCATION paris ] ]");
  auto b = parse_seqlogical("  [IN:GET_WEATHER   weather [SL:LOCATION paris]]  ");
  CHECK(structurally_equal(a, b));
}

TEST_CASE("parse errors") {
  CHECK(error_kind("[IN:GET_WEATHER [SL:LOCATION paris ]") == ParseErrorKind::kUnbalancedBrackets);
  CHECK(error_kind("") == ParseErrorKind::kUnbalancedBrackets);
  CHECK(error_kind("]") == ParseErrorKind::kUnbalancedBrackets);
  CHECK(error_kind("[IN:A ] ]") == ParseErrorKind::kUnbalancedBrackets);
  CHECK(error_kind("[ ]") == ParseErrorKind::kEmptyLabel);
  CHECK(error_kind("[[IN:A ] ]") == ParseErrorKind::kEmptyLabel);
  CHECK(error_kind("[in:a x ]") == ParseErrorKind::kBadLabelPrefix);
  CHECK(error_kind("[IN: x ]") == ParseErrorKind::kBadLabelPrefix);
  CHECK(error_kind("[FOO x ]") == ParseErrorKind::kBadLabelPrefix);
  CHECK(error_kind("[SL:LOCATION paris ]") == ParseErrorKind::kRootNotIntent);
  CHECK(error_kind("[IN:A ] [IN:B ]") == ParseErrorKind::kMultipleRoots);
  CHECK(error_kind("[IN:A ] junk") == ParseErrorKind::kTrailingContent);
  CHECK(error_kind("junk [IN:A ]") == ParseErrorKind::kTrailingContent);
  CHECK(error_kind("[IN:A [SL:B [SL:C x ] ] ]") == ParseErrorKind::kSlotInsideSlot);
}

TEST_CASE("error positions point at the offending byte") {
  ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
  CHECK_FALSE(try_parse_seqlogical("[IN:A x ] y", &error).has_value());
  CHECK(error.position() == 10);
}

TEST_CASE("serialize canonical form") {
  CHECK(serialize(parse_seqlogical(kWeatherExample1)) == kWeatherExample1);
  CHECK(serialize(parse_seqlogical("[IN:X]")) == "[IN:X ]");
  CHECK(serialize(parse_seqlogical(" [IN:A  x   [SL:B y]] ")) == "[IN:A x [SL:B y ] ]");
}

TEST_CASE("extract transcript") {
  CHECK(extract_transcript(parse_seqlogical(kWeatherExample1)) ==
        "what kind of weather is in paris");
  CHECK(extract_transcript(parse_seqlogical(kWeatherExample2)) ==
        "what is the temperature at the north pole");
  CHECK(extract_transcript(parse_seqlogical(kWeatherExample3)) ==
        "tell me what the weather in central park is like");
  CHECK(extract_transcript(parse_seqlogical("[IN:X ]")) == "");
}

TEST_CASE("top intent") {
  CHECK(top_intent(parse_seqlogical(kWeatherExample1)) == "IN:GET_WEATHER");
  CHECK(top_intent(parse_seqlogical("[IN:X ]")) == "IN:X");
  CHECK(top_intent(parse_seqlogical("[IN:A x [IN:B y ] ]")) == "IN:A");
}

TEST_CASE("decoupled form drops tokens outside slots") {
  CHECK(to_decoupled(parse_seqlogical(kWeatherExample1)) ==
        "[IN:GET_WEATHER [SL:LOCATION paris ] ]");
  CHECK(to_decoupled(parse_seqlogical("[IN:X ]")) == "[IN:X ]");
  // Tokens under an intent nested in a slot still have a slot ancestor.
  CHECK(to_decoupled(parse_seqlogical("[IN:A x [SL:B y [IN:C z ] ] ]")) ==
        "[IN:A [SL:B y [IN:C z ] ] ]");
}

TEST_CASE("decoupling matches the token-filter oracle and is idempotent") {
  testutil::TreeGenerator gen(101);
  for (int i = 0; i < 500; ++i) {
    SeqlogicalParse parse = gen.next();
    SeqlogicalParse expected{strip_unslotted_tokens(parse.root, false), ""};
    std::string decoupled = to_decoupled(parse);
    CHECK(decoupled == serialize(expected));
    CHECK(to_decoupled(parse_seqlogical(decoupled)) == decoupled);
  }
}

TEST_CASE("round trip over random trees") {
  testutil::TreeGenerator gen(7);
  for (int i = 0; i < 2000; ++i) {
    SeqlogicalParse parse = gen.next();
    std::string wire = serialize(parse);
    SeqlogicalParse reparsed = parse_seqlogical(wire);
    CHECK(structurally_equal(parse, reparsed));
    CHECK(serialize(reparsed) == wire);
    std::string transcript = extract_transcript(parse);
    std::size_t word_count =
        transcript.empty()
            ? 0
            : static_cast<std::size_t>(std::count(transcript.begin(), transcript.end(), ' ')) + 1;
    CHECK(count_token_nodes(parse.root) == word_count);
  }
}

TEST_CASE("parser is total over arbitrary bytes") {
  Lcg64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    std::string input = testutil::random_fuzz_string(rng);
    ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
    auto parse = try_parse_seqlogical(input, &error);
    if (parse) {
      // Whatever parsed must round-trip.
      CHECK(structurally_equal(*parse, parse_seqlogical(serialize(*parse))));
    }
  }
}

TEST_CASE("deeply nested input does not overflow the stack") {
  std::string text;
  for (int i = 0; i < 200000; ++i) text += "[IN:A ";
  CHECK(error_kind(text) == ParseErrorKind::kUnbalancedBrackets);
}

TEST_CASE("ontology fixture inventory") {
  Ontology ontology = load_ontology(testutil::data_dir() / "stop_ontology.txt");
  CHECK(ontology.intents.size() == 28);
  CHECK(ontology.slots.size() == 82);
  CHECK(ontology.domains.size() == 8);
  CHECK(ontology.domain_of("IN:GET_WEATHER") == "weather");
  CHECK(ontology.domain_of("IN:ADD_TIME_TIMER") == "timer");
}

TEST_CASE("validation against the ontology") {
  Ontology ontology = load_ontology(testutil::data_dir() / "stop_ontology.txt");

  ValidationReport clean = validate_against_ontology(parse_seqlogical(kWeatherExample1), ontology);
  CHECK(clean.clean());

  ValidationReport bad_intent = validate_against_ontology(
      parse_seqlogical("[IN:MADE_UP what is this ]"), ontology);
  CHECK_FALSE(bad_intent.clean());
  REQUIRE(bad_intent.oov_intents.size() == 1);
  CHECK(bad_intent.oov_intents[0] == "IN:MADE_UP");
  CHECK(bad_intent.oov_slots.empty());

  ValidationReport bad_slot = validate_against_ontology(
      parse_seqlogical("[IN:GET_WEATHER rain in [SL:NOT_A_SLOT london ] ]"), ontology);
  CHECK_FALSE(bad_slot.clean());
  REQUIRE(bad_slot.oov_slots.size() == 1);
  CHECK(bad_slot.oov_slots[0] == "SL:NOT_A_SLOT");

  ValidationReport bad_combo = validate_against_ontology(
      parse_seqlogical("[IN:GET_WEATHER rain [SL:ALARM_NAME work ] ]"), ontology);
  CHECK(bad_combo.oov_intents.empty());
  CHECK(bad_combo.oov_slots.empty());
  CHECK_FALSE(bad_combo.combination_known);
  CHECK_FALSE(bad_combo.clean());
}

TEST_CASE("ontology referential errors are rejected") {
  CHECK_THROWS_AS(parse_ontology("DOMAIN weather IN:GET_WEATHER\n", "test"), OntologyError);
  CHECK_THROWS_AS(parse_ontology("INTENT IN:A\nCOMBO IN:A SL:B\n", "test"), OntologyError);
  CHECK_THROWS_AS(parse_ontology("INTENT bogus\n", "test"), OntologyError);
}

TEST_CASE("ontology without combos does not constrain combinations") {
  Ontology ontology = parse_ontology("INTENT IN:A\nSLOT SL:B\n", "test");
  CHECK(validate_against_ontology(parse_seqlogical("[IN:A [SL:B x ] ]"), ontology).clean());
}
