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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "semforge/errors.hpp"
#include "semforge/record.hpp"

namespace semforge::data {

class SchemaError : public Error {
 public:
  SchemaError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnknownDomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientExamplesError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string> kStopDomains = {
    "alarm", "event", "messaging", "music", "navigation", "reminder", "timer", "weather"};

nlohmann::ordered_json record_to_json(const Record& record);
Record record_from_json(const nlohmann::json& json);

struct ReadIssue {
  int line;
  std::string message;
};

struct ReadResult {
  std::vector<Record> records;
  std::vector<ReadIssue> skipped;  // populated in lenient mode
};

// One JSON object per line. Strict mode throws SchemaError at the first
// invalid line; lenient mode skips invalid lines and reports them with
// line numbers. Record invariants (parse validity, transcript match,
// unique ids) are enforced on read and on write.
ReadResult read_jsonl(const std::filesystem::path& path, bool lenient = false);
void write_jsonl(std::span<const Record> records, const std::filesystem::path& path);

struct SplitManifest {
  std::string name;
  std::string policy;  // "ed_half" | "nd_domain" | "weather_holdout"
  std::uint64_t seed = 0;
  std::vector<std::string> part_a;
  std::vector<std::string> part_b;

  nlohmann::ordered_json to_json() const;
};

// Shuffles each domain with the seeded generator and halves it; per-domain
// imbalance is at most 1, and the extra record of odd-sized domains
// alternates between the parts (sorted domain order) so the global sizes
// also differ by at most 1.
SplitManifest split_ed(std::span<const Record> records, std::uint64_t seed);

// Fixed partition: {messaging, reminder, timer, weather} vs {alarm, event,
// music, navigation}. Domain "time" is accepted as an alias of "timer";
// anything else off the 8-domain list is an UnknownDomainError.
SplitManifest split_nd(std::span<const Record> records);

struct WeatherHoldout {
  std::vector<Record> seen;           // all non-weather records
  std::vector<Record> seed_examples;  // k per (intent, slot-set) combination
  std::vector<Record> hidden;         // remaining weather records

  nlohmann::ordered_json to_json() const;  // id lists only
};

// Partitions weather out as the new domain and samples k_examples seed
// records per (intent, slot set) combination. A combination with fewer
// than k_examples records is an InsufficientExamplesError.
WeatherHoldout weather_holdout(std::span<const Record> records, int k_examples,
                               std::uint64_t seed);

}  // namespace semforge::data
