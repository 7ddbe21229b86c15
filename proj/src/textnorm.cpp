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

#include "semforge/textnorm.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <vector>

namespace semforge {

namespace {

constexpr std::array<const char*, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};

constexpr std::array<const char*, 10> kTens = {
    "",      "",      "twenty",  "thirty", "forty",
    "fifty", "sixty", "seventy", "eighty", "ninety"};

void append_word(std::string& out, std::string_view word) {
  if (!out.empty()) out += ' ';
  out += word;
}

std::string below_hundred(unsigned v) {
  if (v < 20) return kOnes[v];
  std::string out = kTens[v / 10];
  if (v % 10) {
    out += ' ';
    out += kOnes[v % 10];
  }
  return out;
}

// Last-word cardinal -> ordinal ("twenty one" -> "twenty first").
std::string ordinal_last_word(std::string words) {
  auto space = words.find_last_of(' ');
  std::string head = space == std::string::npos ? "" : words.substr(0, space + 1);
  std::string last = space == std::string::npos ? words : words.substr(space + 1);
  if (last == "zero") last = "zeroth";
  else if (last == "one") last = "first";
  else if (last == "two") last = "second";
  else if (last == "three") last = "third";
  else if (last == "five") last = "fifth";
  else if (last == "eight") last = "eighth";
  else if (last == "nine") last = "ninth";
  else if (last == "twelve") last = "twelfth";
  else if (last.size() > 1 && last.back() == 'y') last = last.substr(0, last.size() - 1) + "ieth";
  else last += "th";
  return head + last;
}

// Apostrophe forms mapped to ASCII ' before filtering: U+2018, U+2019,
// U+02BC (UTF-8 byte sequences).
std::string fold_apostrophes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    unsigned char a = text[i];
    if (a == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      out += '\'';
      i += 3;
    } else if (a == 0xCA && i + 1 < text.size() &&
               static_cast<unsigned char>(text[i + 1]) == 0xBC) {
      out += '\'';
      i += 2;
    } else {
      out += text[i];
      ++i;
    }
  }
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// "21st" -> 21; npos-style failure via nullopt shape (returns false).
bool parse_ordinal_token(std::string_view token, unsigned& value) {
  static constexpr std::string_view kSuffixes[] = {"st", "nd", "rd", "th"};
  if (token.size() < 3) return false;
  std::string_view suffix = token.substr(token.size() - 2);
  bool suffix_ok = false;
  for (std::string_view s : kSuffixes) suffix_ok = suffix_ok || suffix == s;
  if (!suffix_ok) return false;
  std::string_view digits = token.substr(0, token.size() - 2);
  if (!all_digits(digits) || digits.size() > 4) return false;
  value = 0;
  for (char c : digits) value = value * 10 + static_cast<unsigned>(c - '0');
  return true;
}

// Expands one whitespace-free token. Digit runs inside mixed tokens are
// read digit by digit so that expanded output never contains digits.
std::string expand_token(std::string_view token) {
  unsigned ordinal_value = 0;
  if (all_digits(token) && token.size() <= 4) {
    unsigned value = 0;
    for (char c : token) value = value * 10 + static_cast<unsigned>(c - '0');
    return number_to_words(value);
  }
  if (parse_ordinal_token(token, ordinal_value)) {
    return ordinal_to_words(ordinal_value);
  }
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    if (std::isdigit(static_cast<unsigned char>(token[i]))) {
      while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
        append_word(out, kOnes[static_cast<unsigned>(token[i] - '0')]);
        ++i;
      }
    } else {
      std::size_t start = i;
      while (i < token.size() && !std::isdigit(static_cast<unsigned char>(token[i]))) ++i;
      append_word(out, token.substr(start, i - start));
    }
  }
  return out;
}

}  // namespace

std::string number_to_words(unsigned value) {
  if (value < 100) return below_hundred(value);
  std::string out;
  if (value >= 1000) {
    out = kOnes[value / 1000];
    out += " thousand";
    value %= 1000;
  }
  if (value >= 100) {
    append_word(out, kOnes[value / 100]);
    out += " hundred";
    value %= 100;
  }
  if (value) append_word(out, below_hundred(value));
  return out;
}

std::string ordinal_to_words(unsigned value) {
  // The suffix always attaches to the final word: "twenty first",
  // "one hundredth", "two thousandth".
  return ordinal_last_word(number_to_words(value));
}

std::string normalize(std::string_view text, const NormalizationConfig& config) {
  std::string folded = fold_apostrophes(text);

  std::string filtered;
  filtered.reserve(folded.size());
  for (char c : folded) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 'A' && u <= 'Z') {
      filtered += static_cast<char>(u - 'A' + 'a');
    } else if ((u >= 'a' && u <= 'z') || (u >= '0' && u <= '9')) {
      filtered += static_cast<char>(u);
    } else if (u == '\'') {
      if (config.keep_apostrophes) filtered += '\'';
    } else if (u == '-' || std::isspace(u)) {
      filtered += ' ';
    }
    // Everything else (punctuation, non-ASCII bytes) is removed in place.
  }

  std::istringstream in(filtered);
  std::string token;
  std::string out;
  while (in >> token) {
    if (config.expand_numbers) {
      std::string expanded = expand_token(token);
      if (!expanded.empty()) append_word(out, expanded);
    } else {
      append_word(out, token);
    }
  }
  return out;
}

}  // namespace semforge
