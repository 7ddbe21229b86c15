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

#include "semforge/textnorm.hpp"
#include "testutil.hpp"

using namespace semforge;

namespace {

bool in_output_alphabet(const std::string& s, bool digits_allowed) {
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || c == '\'' || c == ' ' ||
              (digits_allowed && c >= '0' && c <= '9');
    if (!ok) return false;
  }
  return true;
}

int count_apostrophes(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\''));
}

}  // namespace

TEST_CASE("number words") {
  CHECK(number_to_words(0) == "zero");
  CHECK(number_to_words(7) == "seven");
  CHECK(number_to_words(15) == "fifteen");
  CHECK(number_to_words(21) == "twenty one");
  CHECK(number_to_words(40) == "forty");
  CHECK(number_to_words(95) == "ninety five");
  CHECK(number_to_words(100) == "one hundred");
  CHECK(number_to_words(101) == "one hundred one");
  CHECK(number_to_words(360) == "three hundred sixty");
  CHECK(number_to_words(1000) == "one thousand");
  CHECK(number_to_words(9999) == "nine thousand nine hundred ninety nine");
}

TEST_CASE("ordinal words") {
  CHECK(ordinal_to_words(1) == "first");
  CHECK(ordinal_to_words(2) == "second");
  CHECK(ordinal_to_words(3) == "third");
  CHECK(ordinal_to_words(4) == "fourth");
  CHECK(ordinal_to_words(5) == "fifth");
  CHECK(ordinal_to_words(8) == "eighth");
  CHECK(ordinal_to_words(9) == "ninth");
  CHECK(ordinal_to_words(12) == "twelfth");
  CHECK(ordinal_to_words(20) == "twentieth");
  CHECK(ordinal_to_words(21) == "twenty first");
  CHECK(ordinal_to_words(100) == "one hundredth");
}

TEST_CASE("normalize basic rules") {
  CHECK(normalize("What's the Weather in Paris?") == "what's the weather in paris");
  CHECK(normalize("") == "");
  CHECK(normalize("   ") == "");
  CHECK(normalize("Hello,   World!!") == "hello world");
  CHECK(normalize("drop-off point") == "drop off point");
}

TEST_CASE("normalize expands numbers into spoken form") {
  CHECK(normalize("Is it going to be around 95 in degree Fahrenheit san francisco tomorrow") ==
        "is it going to be around ninety five in degree fahrenheit san francisco tomorrow");
  CHECK(normalize("wake me at 7") == "wake me at seven");
  CHECK(normalize("the 1st of May") == "the first of may");
  CHECK(normalize("meet on the 22nd") == "meet on the twenty second");
  CHECK(normalize("code 12345") == "code one two three four five");
}

TEST_CASE("normalize keeps digits when expansion is off") {
  NormalizationConfig config;
  config.expand_numbers = false;
  CHECK(normalize("around 95 degrees", config) == "around 95 degrees");
  CHECK(normalize("the 1st of May", config) == "the 1st of may");
}

TEST_CASE("unicode apostrophes fold to ascii") {
  CHECK(normalize("what\xE2\x80\x99s up") == "what's up");
  CHECK(normalize("it\xE2\x80\x99s 5", NormalizationConfig{}) == "it's five");
}

TEST_CASE("apostrophes can be stripped when configured") {
  NormalizationConfig config;
  config.keep_apostrophes = false;
  CHECK(normalize("what's up", config) == "whats up");
}

TEST_CASE("normalize is idempotent and alphabet-clean on arbitrary input") {
  Lcg64 rng(2024);
  NormalizationConfig expand;
  NormalizationConfig keep_digits;
  keep_digits.expand_numbers = false;
  for (int i = 0; i < 2000; ++i) {
    std::string input = testutil::random_fuzz_string(rng);
    std::string once = normalize(input, expand);
    CHECK(in_output_alphabet(once, false));
    CHECK(normalize(once, expand) == once);

    std::string raw = normalize(input, keep_digits);
    CHECK(in_output_alphabet(raw, true));
    CHECK(normalize(raw, keep_digits) == raw);
  }
}

TEST_CASE("apostrophe count never increases on ascii input") {
  Lcg64 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::string input;
    std::size_t len = rng.bounded(60);
    for (std::size_t j = 0; j < len; ++j) {
      input += static_cast<char>(32 + rng.bounded(95));  // printable ASCII
    }
    std::string out = normalize(input);
    CHECK(count_apostrophes(out) <= count_apostrophes(input));
  }
}
