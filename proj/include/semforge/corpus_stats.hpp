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
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/record.hpp"

namespace semforge::stats {

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// Per intent, the non-stopword transcript tokens most frequently seen in
// records with that top intent; count descending, ties lexicographic
// ascending, at most k entries.
struct IntentWordTable {
  std::map<std::string, std::vector<std::pair<std::string, std::uint64_t>>> entries;
};

// Every token occurrence counts once; tokens are matched against the
// stopword set after ASCII lowercasing. Parallelized over records; the
// result is identical for any schedule or thread count.
IntentWordTable build_intent_word_table(std::span<const Record> records,
                                        const std::set<std::string>& stopwords,
                                        int k);

// Single-threaded reference used by tests and the benchmark.
IntentWordTable build_intent_word_table_serial(std::span<const Record> records,
                                               const std::set<std::string>& stopwords,
                                               int k);

// Intent -> distinct slot-label sets observed with it.
struct ComboTable {
  std::map<std::string, std::set<std::set<std::string>>> entries;
};

ComboTable build_combo_table(std::span<const Record> records);

// Keeps the first occurrence of each normalized text (number expansion
// on); order of survivors is the input order.
std::vector<std::string> dedup(std::span<const std::string> texts);

// One lowercase word per line; '#' comments and blank lines ignored.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace semforge::stats
