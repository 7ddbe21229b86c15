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

#include <optional>
#include <string>

#include "semforge/errors.hpp"

namespace semforge {

// One dataset row. `seqlogical` must parse and its transcript must equal
// `transcript`; validate_record enforces this before anything is written.
struct Record {
  std::string id;
  std::string domain;
  std::string transcript;
  std::string seqlogical;
  std::optional<std::string> audio_ref;
  std::optional<std::string> asr_hypothesis;
  std::optional<std::string> embedding_ref;
  std::optional<std::string> repr;  // "jat" | "tts" | "real"
  std::string source;               // "stop" | "llm_iwp" | "llm_ep" | "llm_ep_parse" | "seed_example"

  bool operator==(const Record&) const = default;
};

inline constexpr const char* kSourceStop = "stop";
inline constexpr const char* kSourceLlmIwp = "llm_iwp";
inline constexpr const char* kSourceLlmEp = "llm_ep";
inline constexpr const char* kSourceLlmEpParse = "llm_ep_parse";
inline constexpr const char* kSourceSeedExample = "seed_example";

bool is_valid_source_tag(const std::string& tag);
bool is_valid_repr_tag(const std::string& tag);

class RecordError : public Error {
 public:
  using Error::Error;
};

// Throws RecordError when a field is missing or the parse/transcript
// invariant does not hold.
void validate_record(const Record& record);

}  // namespace semforge
