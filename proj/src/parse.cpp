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

#include "semforge/parse.hpp"

#include <utility>

namespace semforge {

namespace {

bool is_label_body_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool has_label_shape(std::string_view s, std::string_view prefix) {
  if (s.size() <= prefix.size() || s.substr(0, prefix.size()) != prefix) return false;
  for (char c : s.substr(prefix.size())) {
    if (!is_label_body_char(c)) return false;
  }
  return true;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

bool is_intent_label(std::string_view s) { return has_label_shape(s, "IN:"); }
bool is_slot_label(std::string_view s) { return has_label_shape(s, "SL:"); }

ParseNode ParseNode::intent(std::string label) {
  ParseNode n;
  n.kind = Kind::kIntent;
  n.label = std::move(label);
  return n;
}

ParseNode ParseNode::slot(std::string label) {
  ParseNode n;
  n.kind = Kind::kSlot;
  n.label = std::move(label);
  return n;
}

ParseNode ParseNode::token(std::string text) {
  ParseNode n;
  n.kind = Kind::kToken;
  n.text = std::move(text);
  return n;
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ParseErrorKind::kEmptyLabel: return "EmptyLabel";
    case ParseErrorKind::kBadLabelPrefix: return "BadLabelPrefix";
    case ParseErrorKind::kRootNotIntent: return "RootNotIntent";
    case ParseErrorKind::kMultipleRoots: return "MultipleRoots";
    case ParseErrorKind::kTrailingContent: return "TrailingContent";
    case ParseErrorKind::kSlotInsideSlot: return "SlotInsideSlot";
  }
  return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t position)
    : Error(std::string(to_string(kind)) + " at position " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

// The parser is iterative: the stack holds the chain of open nodes, so
// arbitrarily deep inputs cannot overflow the call stack.
SeqlogicalParse parse_seqlogical(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  std::vector<ParseNode> open;
  std::optional<ParseNode> root;

  auto skip_space = [&] {
    while (i < n && is_space(text[i])) ++i;
  };

  while (true) {
    skip_space();
    if (i >= n) break;
    const char c = text[i];

    if (c == '[') {
      if (open.empty() && root) throw ParseError(ParseErrorKind::kMultipleRoots, i);
      ++i;
      skip_space();
      const std::size_t label_start = i;
      while (i < n && !is_space(text[i]) && text[i] != '[' && text[i] != ']') ++i;
      std::string_view label = text.substr(label_start, i - label_start);
      if (label.empty()) throw ParseError(ParseErrorKind::kEmptyLabel, label_start);

      ParseNode node;
      if (is_intent_label(label)) {
        node = ParseNode::intent(std::string(label));
      } else if (is_slot_label(label)) {
        node = ParseNode::slot(std::string(label));
      } else {
        throw ParseError(ParseErrorKind::kBadLabelPrefix, label_start);
      }
      if (open.empty() && node.kind != ParseNode::Kind::kIntent) {
        throw ParseError(ParseErrorKind::kRootNotIntent, label_start);
      }
      if (!open.empty() && open.back().kind == ParseNode::Kind::kSlot &&
          node.kind == ParseNode::Kind::kSlot) {
        throw ParseError(ParseErrorKind::kSlotInsideSlot, label_start);
      }
      open.push_back(std::move(node));
    } else if (c == ']') {
      if (open.empty()) throw ParseError(ParseErrorKind::kUnbalancedBrackets, i);
      ParseNode done = std::move(open.back());
      open.pop_back();
      if (open.empty()) {
        root = std::move(done);
      } else {
        open.back().children.push_back(std::move(done));
      }
      ++i;
    } else {
      const std::size_t tok_start = i;
      while (i < n && !is_space(text[i]) && text[i] != '[' && text[i] != ']') ++i;
      if (open.empty()) throw ParseError(ParseErrorKind::kTrailingContent, tok_start);
      open.back().children.push_back(
          ParseNode::token(std::string(text.substr(tok_start, i - tok_start))));
    }
  }

  if (!open.empty()) throw ParseError(ParseErrorKind::kUnbalancedBrackets, n);
  if (!root) throw ParseError(ParseErrorKind::kUnbalancedBrackets, 0);
  return SeqlogicalParse{std::move(*root), std::string(text)};
}

std::optional<SeqlogicalParse> try_parse_seqlogical(std::string_view text,
                                                    ParseError* error) {
  try {
    return parse_seqlogical(text);
  } catch (const ParseError& e) {
    if (error) *error = e;
    return std::nullopt;
  }
}

namespace {

// Iterative walkers: metrics and repair feed these the output of
// parse_seqlogical on untrusted input, which can nest deeply.
struct WalkItem {
  const ParseNode* node;
  std::size_t next_child = 0;
};

void serialize_into(const ParseNode& top, std::string& out) {
  std::vector<WalkItem> stack;
  stack.push_back({&top});
  if (top.kind == ParseNode::Kind::kToken) {
    out += top.text;
    return;
  }
  out += '[';
  out += top.label;
  while (!stack.empty()) {
    WalkItem& item = stack.back();
    if (item.next_child < item.node->children.size()) {
      const ParseNode& child = item.node->children[item.next_child++];
      out += ' ';
      if (child.kind == ParseNode::Kind::kToken) {
        out += child.text;
      } else {
        out += '[';
        out += child.label;
        stack.push_back({&child});
      }
    } else {
      out += " ]";
      stack.pop_back();
    }
  }
}

}  // namespace

std::string serialize(const ParseNode& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

std::string serialize(const SeqlogicalParse& parse) { return serialize(parse.root); }

std::string extract_transcript(const SeqlogicalParse& parse) {
  std::string out;
  std::vector<WalkItem> stack;
  stack.push_back({&parse.root});
  while (!stack.empty()) {
    WalkItem& item = stack.back();
    if (item.next_child < item.node->children.size()) {
      const ParseNode& child = item.node->children[item.next_child++];
      if (child.kind == ParseNode::Kind::kToken) {
        if (!out.empty()) out += ' ';
        out += child.text;
      } else {
        stack.push_back({&child});
      }
    } else {
      stack.pop_back();
    }
  }
  return out;
}

std::string to_decoupled(const SeqlogicalParse& parse) {
  // Same writer as serialize_into, but token children are emitted only
  // when some enclosing node is a slot.
  std::string out;
  struct Item {
    const ParseNode* node;
    std::size_t next_child = 0;
    bool under_slot = false;
  };
  std::vector<Item> stack;
  out += '[';
  out += parse.root.label;
  stack.push_back({&parse.root, 0, parse.root.kind == ParseNode::Kind::kSlot});
  while (!stack.empty()) {
    Item& item = stack.back();
    if (item.next_child < item.node->children.size()) {
      const ParseNode& child = item.node->children[item.next_child++];
      if (child.kind == ParseNode::Kind::kToken) {
        if (item.under_slot) {
          out += ' ';
          out += child.text;
        }
      } else {
        out += " [";
        out += child.label;
        bool child_under_slot =
            item.under_slot || child.kind == ParseNode::Kind::kSlot;
        stack.push_back({&child, 0, child_under_slot});
      }
    } else {
      out += " ]";
      stack.pop_back();
    }
  }
  return out;
}

std::string top_intent(const SeqlogicalParse& parse) { return parse.root.label; }

std::size_t count_token_nodes(const ParseNode& node) {
  std::size_t count = 0;
  std::vector<WalkItem> stack;
  stack.push_back({&node});
  if (node.kind == ParseNode::Kind::kToken) return 1;
  while (!stack.empty()) {
    WalkItem& item = stack.back();
    if (item.next_child < item.node->children.size()) {
      const ParseNode& child = item.node->children[item.next_child++];
      if (child.kind == ParseNode::Kind::kToken) {
        ++count;
      } else {
        stack.push_back({&child});
      }
    } else {
      stack.pop_back();
    }
  }
  return count;
}

bool structurally_equal(const SeqlogicalParse& a, const SeqlogicalParse& b) {
  return a.root == b.root;
}

}  // namespace semforge
