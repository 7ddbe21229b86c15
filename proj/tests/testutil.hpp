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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semforge/parse.hpp"
#include "semforge/rng.hpp"

namespace semforge::testutil {

inline std::filesystem::path data_dir() {
  return std::filesystem::path(SEMFORGE_DATA_DIR);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::path(SEMFORGE_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Random well-formed parse trees: intent root; intents hold tokens, slots
// and intents; slots hold tokens and intents; every slot/intent has at
// least enough structure to serialize and reparse.
class TreeGenerator {
 public:
  explicit TreeGenerator(std::uint64_t seed) : rng_(seed) {}

  SeqlogicalParse next() {
    ParseNode root = make_intent(0);
    SeqlogicalParse parse{root, ""};
    parse.source_text = serialize(parse);
    return parse;
  }

 private:
  std::string random_word() {
    static const char* kWords[] = {"weather", "in",    "paris",  "what",  "is",
                                   "the",     "set",   "an",     "alarm", "for",
                                   "play",    "music", "please", "now",   "don't",
                                   "tomorrow"};
    return kWords[rng_.bounded(std::size(kWords))];
  }

  std::string random_label_body() {
    static const char* kBodies[] = {"GET_WEATHER", "GET_SUNRISE", "PLAY_MUSIC",
                                    "CREATE_ALARM", "LOCATION",   "DATE_TIME",
                                    "X", "A_1", "B2"};
    return kBodies[rng_.bounded(std::size(kBodies))];
  }

  ParseNode make_token() { return ParseNode::token(random_word()); }

  ParseNode make_slot(int depth) {
    ParseNode node = ParseNode::slot("SL:" + random_label_body());
    std::size_t n_children = rng_.bounded(3) + (depth > 2 ? 1 : 0);
    for (std::size_t i = 0; i < n_children; ++i) {
      if (depth < 3 && rng_.bounded(10) == 0) {
        node.children.push_back(make_intent(depth + 1));
      } else {
        node.children.push_back(make_token());
      }
    }
    return node;
  }

  ParseNode make_intent(int depth) {
    ParseNode node = ParseNode::intent("IN:" + random_label_body());
    std::size_t n_children = 1 + rng_.bounded(4);
    if (depth >= 3) n_children = rng_.bounded(2);
    for (std::size_t i = 0; i < n_children; ++i) {
      std::uint64_t pick = rng_.bounded(10);
      if (depth < 3 && pick < 3) {
        node.children.push_back(make_slot(depth + 1));
      } else if (depth < 3 && pick == 3) {
        node.children.push_back(make_intent(depth + 1));
      } else {
        node.children.push_back(make_token());
      }
    }
    return node;
  }

  Lcg64 rng_;
};

// Arbitrary byte strings for fuzzing the parser; biased toward brackets,
// spaces and label-ish fragments so structural paths get exercised.
inline std::string random_fuzz_string(Lcg64& rng) {
  static const char* kFragments[] = {"[", "]", " ", "IN:", "SL:", "IN:A", "SL:B",
                                     "x",  "don't", "[IN:", "]]", "  ", "\t"};
  std::size_t parts = rng.bounded(40);
  std::string out;
  for (std::size_t i = 0; i < parts; ++i) {
    if (rng.bounded(4) == 0) {
      out += static_cast<char>(rng.bounded(256));
    } else {
      out += kFragments[rng.bounded(std::size(kFragments))];
    }
  }
  return out;
}

}  // namespace semforge::testutil
