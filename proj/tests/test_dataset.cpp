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

#include <fstream>
#include <map>
#include <set>

#include "semforge/dataset.hpp"
#include "testutil.hpp"

using namespace semforge;
using namespace semforge::data;

namespace {

Record make_record(const std::string& id, const std::string& domain,
                   const std::string& intent, const std::string& words) {
  Record r;
  r.id = id;
  r.domain = domain;
  r.transcript = words;
  r.seqlogical = "[" + intent + (words.empty() ? "" : " " + words) + " ]";
  r.source = "stop";
  return r;
}

std::vector<Record> domain_fixture(const std::map<std::string, int>& counts) {
  std::vector<Record> records;
  int sequence = 0;
  for (const auto& [domain, n] : counts) {
    for (int i = 0; i < n; ++i) {
      records.push_back(make_record("r" + std::to_string(sequence++), domain, "IN:X",
                                    "word" + std::to_string(i)));
    }
  }
  return records;
}

}  // namespace

TEST_CASE("jsonl round trip") {
  auto dir = testutil::scratch_dir("dataset-roundtrip");
  std::vector<Record> records;
  for (int i = 0; i < 1000; ++i) {
    Record r = make_record("id-" + std::to_string(i), "weather", "IN:GET_WEATHER",
                           "weather token" + std::to_string(i));
    if (i % 3 == 0) r.asr_hypothesis = "weather token" + std::to_string(i);
    if (i % 5 == 0) {
      r.embedding_ref = "feats/x.feat";
      r.repr = "real";
    }
    if (i % 7 == 0) r.audio_ref = "audio/" + std::to_string(i) + ".wav";
    records.push_back(std::move(r));
  }
  write_jsonl(records, dir / "corpus.jsonl");
  ReadResult result = read_jsonl(dir / "corpus.jsonl");
  CHECK(result.records == records);
  CHECK(result.skipped.empty());
}

TEST_CASE("schema errors carry line numbers; lenient mode skips") {
  auto dir = testutil::scratch_dir("dataset-schema");
  {
    std::ofstream out(dir / "bad.jsonl");
    out << R"({"id":"a","domain":"weather","transcript":"x","seqlogical":"[IN:X x ]","source":"stop"})" << "\n";
    out << R"({"id":"b","domain":"weather","transcript":"x","source":"stop"})" << "\n";
    out << R"({"id":"c","domain":"weather","transcript":"mismatch","seqlogical":"[IN:X x ]","source":"stop"})" << "\n";
    out << R"({"id":"a","domain":"weather","transcript":"x","seqlogical":"[IN:X x ]","source":"stop"})" << "\n";
  }
  try {
    read_jsonl(dir / "bad.jsonl");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 2);  // missing seqlogical
  }
  ReadResult lenient = read_jsonl(dir / "bad.jsonl", true);
  CHECK(lenient.records.size() == 1);
  REQUIRE(lenient.skipped.size() == 3);
  CHECK(lenient.skipped[0].line == 2);
  CHECK(lenient.skipped[1].line == 3);  // transcript/parse mismatch
  CHECK(lenient.skipped[2].line == 4);  // duplicate id
}

TEST_CASE("write validates records") {
  auto dir = testutil::scratch_dir("dataset-writeval");
  Record bad = make_record("x", "weather", "IN:GET_WEATHER", "some words");
  bad.transcript = "different words entirely";
  std::vector<Record> records = {bad};
  CHECK_THROWS_AS(write_jsonl(records, dir / "out.jsonl"), RecordError);
}

TEST_CASE("split_ed halves every domain with imbalance at most one") {
  auto records = domain_fixture({{"alarm", 25}, {"event", 25}, {"music", 25}, {"weather", 25}});
  SplitManifest manifest = split_ed(records, 7);
  CHECK(manifest.part_a.size() == 50);
  CHECK(manifest.part_b.size() == 50);

  std::map<std::string, std::string> domain_of;
  for (const Record& r : records) domain_of[r.id] = r.domain;
  std::map<std::string, int> count_a, count_b;
  for (const auto& id : manifest.part_a) count_a[domain_of[id]]++;
  for (const auto& id : manifest.part_b) count_b[domain_of[id]]++;
  for (const auto& [domain, n] : count_a) {
    CHECK(std::abs(n - count_b[domain]) <= 1);
    CHECK(n + count_b[domain] == 25);
  }

  // Partition: nothing lost, nothing duplicated.
  std::set<std::string> all(manifest.part_a.begin(), manifest.part_a.end());
  all.insert(manifest.part_b.begin(), manifest.part_b.end());
  CHECK(all.size() == records.size());

  // Determinism and seed sensitivity.
  CHECK(split_ed(records, 7).part_a == manifest.part_a);
  CHECK(split_ed(records, 8).part_a != manifest.part_a);
}

TEST_CASE("split_ed trivia") {
  auto one = domain_fixture({{"weather", 1}});
  SplitManifest manifest = split_ed(one, 3);
  CHECK(manifest.part_a.size() + manifest.part_b.size() == 1);
}

TEST_CASE("split_nd uses the fixed domain partition") {
  auto records = domain_fixture({{"alarm", 10},
                                 {"event", 10},
                                 {"messaging", 10},
                                 {"music", 10},
                                 {"navigation", 10},
                                 {"reminder", 10},
                                 {"timer", 10},
                                 {"weather", 10}});
  SplitManifest manifest = split_nd(records);
  CHECK(manifest.part_a.size() == 40);
  CHECK(manifest.part_b.size() == 40);

  // "time" is accepted as an alias of timer.
  auto aliased = domain_fixture({{"time", 4}, {"alarm", 4}});
  SplitManifest alias_manifest = split_nd(aliased);
  CHECK(alias_manifest.part_a.size() == 4);
  CHECK(alias_manifest.part_b.size() == 4);

  auto unknown = domain_fixture({{"email", 1}});
  CHECK_THROWS_AS(split_nd(unknown), UnknownDomainError);
}

TEST_CASE("split_nd on the bundled corpus is nearly equal") {
  ReadResult corpus = read_jsonl(testutil::data_dir() / "fixtures" / "stop_mini.jsonl");
  REQUIRE(corpus.records.size() == 200);
  SplitManifest manifest = split_nd(corpus.records);
  double a = static_cast<double>(manifest.part_a.size());
  double b = static_cast<double>(manifest.part_b.size());
  CHECK(std::abs(a - b) / std::max(a, b) < 0.05);
}

TEST_CASE("split_ed on the bundled corpus") {
  ReadResult corpus = read_jsonl(testutil::data_dir() / "fixtures" / "stop_mini.jsonl");
  SplitManifest manifest = split_ed(corpus.records, 7);
  std::map<std::string, std::string> domain_of;
  for (const Record& r : corpus.records) domain_of[r.id] = r.domain;
  std::map<std::string, int> count_a, count_b;
  for (const auto& id : manifest.part_a) count_a[domain_of[id]]++;
  for (const auto& id : manifest.part_b) count_b[domain_of[id]]++;
  for (const auto& [domain, n] : count_a) {
    CHECK(std::abs(n - count_b[domain]) <= 1);
  }
}

TEST_CASE("weather holdout seeds k examples per combination") {
  std::vector<Record> records;
  int sequence = 0;
  // 10 weather combos x 10 records each, via distinct slot sets.
  for (int combo = 0; combo < 10; ++combo) {
    for (int i = 0; i < 10; ++i) {
      Record r;
      r.id = "w" + std::to_string(sequence++);
      r.domain = "weather";
      std::string slot = "SL:S" + std::to_string(combo);
      r.transcript = "weather word";
      r.seqlogical = "[IN:GET_WEATHER weather [" + slot + " word ] ]";
      r.source = "stop";
      records.push_back(std::move(r));
    }
  }
  for (int i = 0; i < 30; ++i) {
    records.push_back(make_record("s" + std::to_string(i), "alarm", "IN:CREATE_ALARM", "wake"));
  }

  WeatherHoldout holdout = weather_holdout(records, 3, 11);
  CHECK(holdout.seen.size() == 30);
  CHECK(holdout.seed_examples.size() == 30);  // 10 combos x 3
  CHECK(holdout.hidden.size() == 70);

  // Deterministic given the seed.
  WeatherHoldout again = weather_holdout(records, 3, 11);
  CHECK(again.seed_examples == holdout.seed_examples);

  // A combination with too few records is an error that names it.
  std::vector<Record> thin = {records[0], records[1]};
  thin.push_back(make_record("s-x", "alarm", "IN:CREATE_ALARM", "wake"));
  try {
    weather_holdout(thin, 3, 11);
    FAIL("expected InsufficientExamplesError");
  } catch (const InsufficientExamplesError& e) {
    CHECK(std::string(e.what()).find("IN:GET_WEATHER") != std::string::npos);
  }
}

TEST_CASE("weather holdout on the bundled corpus") {
  ReadResult corpus = read_jsonl(testutil::data_dir() / "fixtures" / "stop_mini.jsonl");
  WeatherHoldout holdout = weather_holdout(corpus.records, 3, 7);
  CHECK(holdout.seen.size() == 156);
  CHECK(holdout.seed_examples.size() == 30);  // 10 combos x 3
  CHECK(holdout.hidden.size() == 14);
  // Partition.
  CHECK(holdout.seen.size() + holdout.seed_examples.size() + holdout.hidden.size() ==
        corpus.records.size());
}
