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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semforge/errors.hpp"

namespace semforge {

// Label syntax: "IN:" / "SL:" prefix followed by one or more characters
// from [A-Z0-9_]. Lowercase after the prefix is invalid.
bool is_intent_label(std::string_view s);
bool is_slot_label(std::string_view s);

// One node of a seqlogical parse tree. Intent nodes may contain tokens,
// slots and intents; slot nodes may contain tokens and intents; token
// nodes are leaves whose text has no whitespace or brackets.
struct ParseNode {
  enum class Kind { kIntent, kSlot, kToken };

  Kind kind = Kind::kToken;
  std::string label;  // intent / slot nodes: "IN:..." or "SL:..."
  std::string text;   // token nodes only
  std::vector<ParseNode> children;

  static ParseNode intent(std::string label);
  static ParseNode slot(std::string label);
  static ParseNode token(std::string text);

  bool operator==(const ParseNode&) const = default;
};

// A parsed utterance: the in-order token texts spell out the transcript.
struct SeqlogicalParse {
  ParseNode root;
  std::string source_text;
};

enum class ParseErrorKind {
  kUnbalancedBrackets,
  kEmptyLabel,
  kBadLabelPrefix,
  kRootNotIntent,
  kMultipleRoots,
  kTrailingContent,
  kSlotInsideSlot,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t position);

  ParseErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  ParseErrorKind kind_;
  std::size_t position_;
};

// Parses one bracketed line. Whitespace between tokens and brackets is
// insignificant beyond separation. Throws ParseError; never crashes on
// arbitrary bytes.
SeqlogicalParse parse_seqlogical(std::string_view text);

// Non-throwing variant; on failure returns nullopt and, when `error` is
// given, stores the failure there.
std::optional<SeqlogicalParse> try_parse_seqlogical(std::string_view text,
                                                    ParseError* error = nullptr);

// Canonical form: single spaces between brackets, labels and tokens, and a
// space before every ']'. parse(serialize(p)) is structurally equal to p.
std::string serialize(const ParseNode& node);
std::string serialize(const SeqlogicalParse& parse);

// In-order token texts joined by single spaces.
std::string extract_transcript(const SeqlogicalParse& parse);

// Canonical serialization after dropping every token that has no slot
// ancestor. Labels and structure are preserved; idempotent.
std::string to_decoupled(const SeqlogicalParse& parse);

std::string top_intent(const SeqlogicalParse& parse);

std::size_t count_token_nodes(const ParseNode& node);

// Tree equality ignoring source_text.
bool structurally_equal(const SeqlogicalParse& a, const SeqlogicalParse& b);

}  // namespace semforge
