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

#include <string>
#include <string_view>

namespace semforge {

struct NormalizationConfig {
  // Expand digit tokens into words: 0..9999 as cardinals ("ninety five"),
  // ordinal suffixes ("1st" -> "first"), longer runs digit by digit.
  bool expand_numbers = true;
  // Apostrophes are the one punctuation mark that survives.
  bool keep_apostrophes = true;
  // Number wording locale; only "en" is implemented.
  std::string locale = "en";
};

// Lowercases, strips punctuation except apostrophes (hyphens become
// spaces), collapses whitespace and optionally expands numbers. Total and
// idempotent: output characters are letters, apostrophes, spaces, and
// digits only when expansion is off.
std::string normalize(std::string_view text, const NormalizationConfig& config = {});

// English cardinal words for 0..9999, space separated, no "and":
// 95 -> "ninety five", 101 -> "one hundred one".
std::string number_to_words(unsigned value);

// English ordinal words for 0..9999: 1 -> "first", 21 -> "twenty first".
std::string ordinal_to_words(unsigned value);

}  // namespace semforge
