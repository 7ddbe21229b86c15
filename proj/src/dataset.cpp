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

#include "semforge/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "semforge/rng.hpp"

namespace semforge::data {

namespace {

std::optional<std::string> optional_field(const nlohmann::json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(std::string("field ") + key + " is not a string");
  return it->get<std::string>();
}

std::string required_field(const nlohmann::json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end()) throw Error(std::string("missing field ") + key);
  if (!it->is_string()) throw Error(std::string("field ") + key + " is not a string");
  return it->get<std::string>();
}

std::string canonical_domain(const std::string& domain) {
  if (domain == "time") return "timer";  // alias seen in the wild
  return domain;
}

}  // namespace

nlohmann::ordered_json record_to_json(const Record& record) {
  nlohmann::ordered_json json;
  json["id"] = record.id;
  json["domain"] = record.domain;
  json["transcript"] = record.transcript;
  json["seqlogical"] = record.seqlogical;
  if (record.audio_ref) json["audio_ref"] = *record.audio_ref;
  if (record.asr_hypothesis) json["asr_hypothesis"] = *record.asr_hypothesis;
  if (record.embedding_ref) json["embedding_ref"] = *record.embedding_ref;
  if (record.repr) json["repr"] = *record.repr;
  json["source"] = record.source;
  return json;
}

Record record_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw Error("record line is not a JSON object");
  Record record;
  record.id = required_field(json, "id");
  record.domain = required_field(json, "domain");
  record.transcript = required_field(json, "transcript");
  record.seqlogical = required_field(json, "seqlogical");
  record.audio_ref = optional_field(json, "audio_ref");
  record.asr_hypothesis = optional_field(json, "asr_hypothesis");
  record.embedding_ref = optional_field(json, "embedding_ref");
  record.repr = optional_field(json, "repr");
  record.source = required_field(json, "source");
  validate_record(record);
  return record;
}

ReadResult read_jsonl(const std::filesystem::path& path, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());

  ReadResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json json = nlohmann::json::parse(line);
      Record record = record_from_json(json);
      if (!ids.insert(record.id).second) {
        throw Error("duplicate id " + record.id);
      }
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      if (!lenient) throw SchemaError(line_no, e.what());
      result.skipped.push_back({line_no, e.what()});
    }
  }
  return result;
}

void write_jsonl(std::span<const Record> records, const std::filesystem::path& path) {
  std::unordered_set<std::string> ids;
  for (const Record& record : records) {
    validate_record(record);
    if (!ids.insert(record.id).second) {
      throw RecordError("duplicate id " + record.id + " in output");
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Record& record : records) {
    out << record_to_json(record).dump() << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

nlohmann::ordered_json SplitManifest::to_json() const {
  return nlohmann::ordered_json{
      {"name", name},           {"policy", policy},       {"seed", seed},
      {"count_a", part_a.size()}, {"count_b", part_b.size()}, {"part_a", part_a},
      {"part_b", part_b},
  };
}

SplitManifest split_ed(std::span<const Record> records, std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const Record& record : records) {
    if (record.domain.empty()) throw Error("record " + record.id + " has no domain");
    by_domain[record.domain].push_back(record.id);
  }

  SplitManifest manifest;
  manifest.name = "ed";
  manifest.policy = "ed_half";
  manifest.seed = seed;

  // Sorted domain order plus per-domain subseeds keep the result
  // independent of input order across domains.
  int odd_counter = 0;
  for (auto& [domain, ids] : by_domain) {
    Lcg64 rng(seed ^ fnv1a64(domain));
    deterministic_shuffle(ids, rng);
    std::size_t half = ids.size() / 2;
    std::size_t take_a = half;
    if (ids.size() % 2 == 1) {
      // The extra record alternates between the parts.
      take_a += (odd_counter++ % 2 == 0) ? 1 : 0;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < take_a ? manifest.part_a : manifest.part_b).push_back(ids[i]);
    }
  }
  return manifest;
}

SplitManifest split_nd(std::span<const Record> records) {
  static const std::set<std::string> kPartA = {"messaging", "reminder", "timer", "weather"};
  static const std::set<std::string> kPartB = {"alarm", "event", "music", "navigation"};

  SplitManifest manifest;
  manifest.name = "nd";
  manifest.policy = "nd_domain";
  manifest.seed = 0;
  for (const Record& record : records) {
    std::string domain = canonical_domain(record.domain);
    if (kPartA.count(domain)) {
      manifest.part_a.push_back(record.id);
    } else if (kPartB.count(domain)) {
      manifest.part_b.push_back(record.id);
    } else {
      throw UnknownDomainError("domain '" + record.domain + "' is not a STOP domain");
    }
  }
  return manifest;
}

nlohmann::ordered_json WeatherHoldout::to_json() const {
  auto ids = [](const std::vector<Record>& records) {
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const Record& record : records) out.push_back(record.id);
    return out;
  };
  return nlohmann::ordered_json{
      {"policy", "weather_holdout"},
      {"seen", ids(seen)},
      {"seed_examples", ids(seed_examples)},
      {"hidden", ids(hidden)},
  };
}

WeatherHoldout weather_holdout(std::span<const Record> records, int k_examples,
                               std::uint64_t seed) {
  if (k_examples < 1) throw Error("k_examples must be positive");

  WeatherHoldout holdout;
  // Combination key -> indices of weather records with it.
  std::map<std::string, std::vector<std::size_t>> by_combo;
  std::vector<std::size_t> weather_indices;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (canonical_domain(records[i].domain) != "weather") {
      holdout.seen.push_back(records[i]);
      continue;
    }
    SeqlogicalParse parse = parse_seqlogical(records[i].seqlogical);
    std::string key = top_intent(parse);
    for (const std::string& slot : slot_label_set(parse)) key += " " + slot;
    by_combo[key].push_back(i);
    weather_indices.push_back(i);
  }
  if (weather_indices.empty()) {
    throw InsufficientExamplesError("corpus has no weather records");
  }

  std::set<std::size_t> chosen;
  for (auto& [combo, indices] : by_combo) {
    if (indices.size() < static_cast<std::size_t>(k_examples)) {
      throw InsufficientExamplesError("combination '" + combo + "' has only " +
                                      std::to_string(indices.size()) + " records, need " +
                                      std::to_string(k_examples));
    }
    Lcg64 rng(seed ^ fnv1a64(combo));
    deterministic_shuffle(indices, rng);
    for (int k = 0; k < k_examples; ++k) chosen.insert(indices[k]);
  }

  for (std::size_t index : weather_indices) {
    (chosen.count(index) ? holdout.seed_examples : holdout.hidden).push_back(records[index]);
  }
  return holdout;
}

}  // namespace semforge::data
