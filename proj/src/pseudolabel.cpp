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

#include "semforge/pseudolabel.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace semforge::label {

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

bool phrase_at(const std::vector<std::string>& tokens, std::size_t pos,
               const std::vector<std::string>& phrase) {
  if (pos + phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (tokens[pos + i] != phrase[i]) return false;
  }
  return true;
}

bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty()) return false;
  for (std::size_t pos = 0; pos + phrase.size() <= tokens.size(); ++pos) {
    if (phrase_at(tokens, pos, phrase)) return true;
  }
  return false;
}

}  // namespace

RuleMockLabeler::RuleMockLabeler(std::vector<KeywordRule> keywords,
                                 std::vector<GazetteerEntry> gazetteer,
                                 std::string fallback_intent)
    : keywords_(std::move(keywords)),
      gazetteer_(std::move(gazetteer)),
      fallback_intent_(std::move(fallback_intent)) {
  // Longest phrases first so "san francisco" wins over "san".
  std::stable_sort(gazetteer_.begin(), gazetteer_.end(),
                   [](const GazetteerEntry& a, const GazetteerEntry& b) {
                     return a.phrase.size() > b.phrase.size();
                   });
}

RuleMockLabeler RuleMockLabeler::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labeler fixture " + path.string());
  std::vector<KeywordRule> keywords;
  std::vector<GazetteerEntry> gazetteer;
  std::string fallback;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> fields = split_tokens(line);
    if (fields.empty()) continue;
    auto expect = [&](bool ok, const char* what) {
      if (!ok) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + what);
      }
    };
    if (fields[0] == "FALLBACK") {
      expect(fields.size() == 2 && is_intent_label(fields[1]), "expected FALLBACK <intent>");
      fallback = fields[1];
    } else if (fields[0] == "KEY") {
      expect(fields.size() >= 3 && is_intent_label(fields[1]), "expected KEY <intent> <word...>");
      keywords.push_back({{fields.begin() + 2, fields.end()}, fields[1]});
    } else if (fields[0] == "GAZ") {
      expect(fields.size() >= 3 && is_slot_label(fields[1]), "expected GAZ <slot> <word...>");
      gazetteer.push_back({{fields.begin() + 2, fields.end()}, fields[1]});
    } else {
      expect(false, "unknown rule kind");
    }
  }
  if (fallback.empty()) throw ConfigError(path.string() + ": missing FALLBACK rule");
  return RuleMockLabeler(std::move(keywords), std::move(gazetteer), std::move(fallback));
}

SeqlogicalParse RuleMockLabeler::label(const std::string& transcript) {
  std::vector<std::string> tokens = split_tokens(transcript);
  if (tokens.empty()) {
    throw LabelerError(LabelerError::Kind::kInconsistentTranscript,
                       "transcript has no tokens");
  }

  std::string intent = fallback_intent_;
  for (const KeywordRule& rule : keywords_) {
    if (contains_phrase(tokens, rule.phrase)) {
      intent = rule.intent;
      break;
    }
  }

  ParseNode root = ParseNode::intent(intent);
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const GazetteerEntry* hit = nullptr;
    for (const GazetteerEntry& entry : gazetteer_) {
      if (phrase_at(tokens, pos, entry.phrase)) {
        hit = &entry;
        break;
      }
    }
    if (hit) {
      ParseNode slot = ParseNode::slot(hit->slot);
      for (const std::string& word : hit->phrase) {
        slot.children.push_back(ParseNode::token(word));
        ++pos;
      }
      root.children.push_back(std::move(slot));
    } else {
      root.children.push_back(ParseNode::token(tokens[pos]));
      ++pos;
    }
  }

  SeqlogicalParse parse{std::move(root), transcript};
  if (extract_transcript(parse) != transcript) {
    throw LabelerError(LabelerError::Kind::kInconsistentTranscript,
                       "labeler output does not spell the transcript");
  }
  return parse;
}

RemoteLabeler::RemoteLabeler(std::string endpoint) : endpoint_(std::move(endpoint)) {}

SeqlogicalParse RemoteLabeler::label(const std::string& transcript) {
  auto scheme = endpoint_.find("://");
  std::size_t path_start =
      endpoint_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  std::string base = path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  nlohmann::json body = {{"transcript", transcript}};
  httplib::Result result = client.Post(path, body.dump(), "application/json");
  if (!result || result->status != 200) {
    throw LabelerError(LabelerError::Kind::kUnavailable,
                       "labeler endpoint unavailable: " + endpoint_);
  }
  std::string seqlogical;
  try {
    seqlogical = nlohmann::json::parse(result->body).at("seqlogical").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LabelerError(LabelerError::Kind::kUnavailable,
                       std::string("malformed labeler payload: ") + e.what());
  }

  ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
  auto parse = try_parse_seqlogical(seqlogical, &error);
  if (!parse || extract_transcript(*parse) != transcript) {
    throw LabelerError(LabelerError::Kind::kInconsistentTranscript,
                       "labeler returned a parse over different words");
  }
  return *parse;
}

double intent_match_accuracy(
    std::span<const std::pair<std::string, SeqlogicalParse>> items) {
  if (items.empty()) throw EmptyInputError("intent match accuracy over empty input");
  std::uint64_t matches = 0;
  for (const auto& [desired, parse] : items) {
    if (top_intent(parse) == desired) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(items.size());
}

double intent_match_accuracy_labels(
    std::span<const std::pair<std::string, std::string>> items) {
  if (items.empty()) throw EmptyInputError("intent match accuracy over empty input");
  std::uint64_t matches = 0;
  for (const auto& [desired, actual] : items) {
    if (desired == actual) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(items.size());
}

}  // namespace semforge::label
