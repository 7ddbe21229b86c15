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

#include "semforge/corpus_stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "semforge/parse.hpp"
#include "semforge/textnorm.hpp"

namespace semforge::stats {

namespace {

using CountMap = std::map<std::string, std::map<std::string, std::uint64_t>>;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Token texts of one record, via its parse so the "words from semantic
// parses" reading is literal.
std::pair<std::string, std::vector<std::string>> intent_and_tokens(const Record& record) {
  SeqlogicalParse parse = parse_seqlogical(record.seqlogical);
  std::vector<std::string> out;
  std::string transcript = extract_transcript(parse);
  std::size_t start = 0;
  while (start < transcript.size()) {
    std::size_t space = transcript.find(' ', start);
    if (space == std::string::npos) {
      out.push_back(transcript.substr(start));
      break;
    }
    out.push_back(transcript.substr(start, space - start));
    start = space + 1;
  }
  return {top_intent(parse), std::move(out)};
}

void count_record(const Record& record, const std::set<std::string>& stopwords,
                  CountMap& counts) {
  auto [intent, tokens] = intent_and_tokens(record);
  auto& word_counts = counts[intent];
  for (const std::string& token : tokens) {
    if (stopwords.count(ascii_lower(token))) continue;
    ++word_counts[token];
  }
}

IntentWordTable table_from_counts(const CountMap& counts, int k) {
  IntentWordTable table;
  for (const auto& [intent, word_counts] : counts) {
    std::vector<std::pair<std::string, std::uint64_t>> entries(word_counts.begin(),
                                                               word_counts.end());
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (entries.size() > static_cast<std::size_t>(k)) entries.resize(k);
    table.entries[intent] = std::move(entries);
  }
  return table;
}

void check_args(std::span<const Record> records, int k) {
  if (records.empty()) throw EmptyCorpusError("intent word table over empty corpus");
  if (k < 1) throw Error("k must be >= 1");
}

}  // namespace

IntentWordTable build_intent_word_table_serial(std::span<const Record> records,
                                               const std::set<std::string>& stopwords,
                                               int k) {
  check_args(records, k);
  CountMap counts;
  for (const Record& record : records) count_record(record, stopwords, counts);
  return table_from_counts(counts, k);
}

IntentWordTable build_intent_word_table(std::span<const Record> records,
                                        const std::set<std::string>& stopwords,
                                        int k) {
  check_args(records, k);
  int max_threads = omp_get_max_threads();
  std::vector<CountMap> partials(max_threads);

#pragma omp parallel
  {
    CountMap& mine = partials[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(records.size()); ++i) {
      count_record(records[i], stopwords, mine);
    }
  }

  // Integer merge in thread order: the totals are schedule-independent.
  CountMap counts;
  for (const CountMap& partial : partials) {
    for (const auto& [intent, word_counts] : partial) {
      auto& into = counts[intent];
      for (const auto& [word, count] : word_counts) into[word] += count;
    }
  }
  return table_from_counts(counts, k);
}

ComboTable build_combo_table(std::span<const Record> records) {
  if (records.empty()) throw EmptyCorpusError("combo table over empty corpus");
  ComboTable table;
  for (const Record& record : records) {
    SeqlogicalParse parse = parse_seqlogical(record.seqlogical);
    std::set<std::string> slots;
    std::vector<const ParseNode*> stack{&parse.root};
    while (!stack.empty()) {
      const ParseNode* node = stack.back();
      stack.pop_back();
      if (node->kind == ParseNode::Kind::kSlot) slots.insert(node->label);
      for (const ParseNode& child : node->children) stack.push_back(&child);
    }
    table.entries[top_intent(parse)].insert(std::move(slots));
  }
  return table;
}

std::vector<std::string> dedup(std::span<const std::string> texts) {
  NormalizationConfig config;
  config.expand_numbers = true;
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    if (seen.insert(normalize(text, config)).second) out.push_back(text);
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    // Trim surrounding whitespace.
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    words.insert(ascii_lower(line.substr(begin, end - begin + 1)));
  }
  return words;
}

}  // namespace semforge::stats
