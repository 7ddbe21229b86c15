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

#include <map>

#include "semforge/dataset.hpp"
#include "semforge/jat.hpp"
#include "semforge/pipeline.hpp"
#include "testutil.hpp"

using namespace semforge;
using namespace semforge::pipeline;

namespace {

PipelineConfig fixture_config(const char* name, const std::filesystem::path& out_dir) {
  PipelineConfig config = load_config(testutil::data_dir() / "fixtures" / name);
  config.out_dir = out_dir;
  return config;
}

// Order-insensitive content hash of a directory tree.
std::uint64_t tree_hash(const std::filesystem::path& root) {
  std::map<std::string, std::uint64_t> entries;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = std::filesystem::relative(entry.path(), root).generic_string();
    entries[rel] = fnv1a64(testutil::read_file(entry.path()));
  }
  std::uint64_t hash = 14695981039346656037ULL;
  for (const auto& [rel, h] : entries) {
    hash ^= fnv1a64(rel) ^ h;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace

TEST_CASE("config files load with path rebasing and reject unknown keys") {
  PipelineConfig config = load_config(testutil::data_dir() / "fixtures" / "ed.conf");
  CHECK(config.mode == "ed");
  CHECK(config.backend == "mock");
  CHECK(config.seed == 7);
  CHECK(config.k_intent_words == 3);
  CHECK(std::filesystem::exists(config.corpus));
  CHECK(std::filesystem::exists(config.ontology));
  CHECK(std::filesystem::exists(config.stopwords));

  PipelineConfig other;
  CHECK_THROWS_AS(apply_override(other, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(other, "dry_run", "maybe"), ConfigError);
}

TEST_CASE("ed pipeline on the bundled fixture") {
  auto out = testutil::scratch_dir("pipeline-ed");
  PipelineConfig config = fixture_config("ed.conf", out);
  PipelineReport report = run_ed_pipeline(config);

  INFO(report.json.dump(2));
  CHECK(report.json["corpus_records"] == 200);
  // 28 intents x up to 3 words each; every intent has at least 3 words.
  CHECK(report.json["plan"]["iwp_prompts"] == 84);
  CHECK(report.json["plan"]["ep_prompts"].get<int>() > 28);

  // The directional quality finding: intent-word prompting yields higher
  // intent match accuracy than exemplar prompting.
  double ima_iwp = report.json["ima"]["iwp"].get<double>();
  double ima_ep = report.json["ima"]["ep"].get<double>();
  CHECK(ima_iwp > ima_ep);

  // Outputs exist and parse.
  data::ReadResult generated = data::read_jsonl(out / "generated.jsonl");
  CHECK(generated.records.size() == report.json["outputs"]["generated"].get<std::size_t>());
  for (const Record& record : generated.records) {
    CHECK((record.source == "llm_iwp" || record.source == "llm_ep"));
    REQUIRE(record.embedding_ref.has_value());
    CHECK(record.repr == "jat");
    CHECK(std::filesystem::exists(out / *record.embedding_ref));
  }
  data::ReadResult augmented = data::read_jsonl(out / "augmented.jsonl");
  CHECK(augmented.records.size() == 200 + generated.records.size());
}

TEST_CASE("ed pipeline is deterministic across runs") {
  auto out_a = testutil::scratch_dir("pipeline-ed-a");
  auto out_b = testutil::scratch_dir("pipeline-ed-b");
  run_ed_pipeline(fixture_config("ed.conf", out_a));
  run_ed_pipeline(fixture_config("ed.conf", out_b));
  CHECK(tree_hash(out_a) == tree_hash(out_b));

  // A different seed changes the outputs.
  auto out_c = testutil::scratch_dir("pipeline-ed-c");
  PipelineConfig config = fixture_config("ed.conf", out_c);
  config.seed = 8;
  run_ed_pipeline(config);
  CHECK(tree_hash(out_a) != tree_hash(out_c));
}

TEST_CASE("ed pipeline with zero prompt sizes still reports") {
  auto out = testutil::scratch_dir("pipeline-ed-zero");
  PipelineConfig config = fixture_config("ed.conf", out);
  config.n_iwp = 0;
  config.n_ep = 0;
  PipelineReport report = run_ed_pipeline(config);
  CHECK(report.json["outputs"]["generated"] == 0);
  CHECK(std::filesystem::exists(out / "report.json"));
  CHECK(std::filesystem::exists(out / "plan.json"));
}

TEST_CASE("ed pipeline dry run emits the plan only") {
  auto out = testutil::scratch_dir("pipeline-ed-dry");
  PipelineConfig config = fixture_config("ed.conf", out);
  config.dry_run = true;
  PipelineReport report = run_ed_pipeline(config);
  CHECK(report.json["dry_run"] == true);
  CHECK(std::filesystem::exists(out / "plan.json"));
  CHECK_FALSE(std::filesystem::exists(out / "generated.jsonl"));
}

TEST_CASE("ed pipeline surfaces stage-tagged config errors") {
  auto out = testutil::scratch_dir("pipeline-ed-err");
  PipelineConfig config = fixture_config("ed.conf", out);
  config.ontology = "/nonexistent/ontology.txt";
  try {
    run_ed_pipeline(config);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "load_ontology");
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("nd pipeline on the bundled fixture") {
  auto out = testutil::scratch_dir("pipeline-nd");
  PipelineConfig config = fixture_config("nd.conf", out);
  PipelineReport report = run_nd_pipeline(config);

  INFO(report.json.dump(2));
  CHECK(report.json["holdout"]["seed_examples"] == 30);
  CHECK(report.json["plan"]["ep_parse_prompts"] == 10);

  // 10 combos x 30 lines, minus the scheduled bad ones; one reprompt round
  // recovers combination failures.
  auto repair = report.json["repair"];
  CHECK(repair["lines_in"] == 300);
  std::size_t kept = repair["accepted"].get<std::size_t>() +
                     repair["repaired"].get<std::size_t>() +
                     repair["reprompt_recovered"].get<std::size_t>();
  CHECK(kept >= 240);
  // Conservation at the repair stage.
  CHECK(repair["accepted"].get<std::size_t>() + repair["repaired"].get<std::size_t>() +
            repair["needs_reprompt"].get<std::size_t>() +
            repair["discarded"].get<std::size_t>() ==
        repair["lines_in"].get<std::size_t>());

  data::ReadResult generated = data::read_jsonl(out / "generated.jsonl");
  CHECK(generated.records.size() >= 240);
  for (const Record& record : generated.records) {
    CHECK(record.domain == "weather");
    CHECK(record.source == "llm_ep_parse");
    REQUIRE(record.embedding_ref.has_value());
  }

  // Augmented = seen + seed examples + generated; hidden set written apart.
  data::ReadResult augmented = data::read_jsonl(out / "augmented.jsonl");
  CHECK(augmented.records.size() == 156 + 30 + generated.records.size());
  data::ReadResult hidden = data::read_jsonl(out / "hidden.jsonl");
  CHECK(hidden.records.size() == 14);
}

TEST_CASE("nd pipeline runs the reprompt round when combinations break") {
  // With 40 lines per prompt the bad-line schedule reaches the kind that
  // keeps an in-vocabulary slot but breaks the combination.
  auto out = testutil::scratch_dir("pipeline-nd-reprompt");
  PipelineConfig config = fixture_config("nd.conf", out);
  config.n_ep_parse = 40;
  PipelineReport report = run_nd_pipeline(config);
  auto repair = report.json["repair"];
  CHECK(repair["needs_reprompt"] == 10);  // one per combination prompt
  CHECK(repair["reprompted"] == 10);
  CHECK(repair["reprompt_recovered"] == 10);
  CHECK(repair["lines_in"] == 400);
}

TEST_CASE("nd pipeline is deterministic across runs") {
  auto out_a = testutil::scratch_dir("pipeline-nd-a");
  auto out_b = testutil::scratch_dir("pipeline-nd-b");
  run_nd_pipeline(fixture_config("nd.conf", out_a));
  run_nd_pipeline(fixture_config("nd.conf", out_b));
  CHECK(tree_hash(out_a) == tree_hash(out_b));
}

TEST_CASE("nd pipeline surfaces insufficient seed examples") {
  auto out = testutil::scratch_dir("pipeline-nd-thin");
  PipelineConfig config = fixture_config("nd.conf", out);
  config.k_examples = 100;
  try {
    run_nd_pipeline(config);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "weather_holdout");
    CHECK(std::string(e.what()).find("IN:GET_") != std::string::npos);
  }
}

TEST_CASE("nd pipeline can ingest external tts features") {
  // Run once with jat to learn the deterministic ids, then synthesize
  // external feature files for those ids and rerun with repr=tts.
  auto first_out = testutil::scratch_dir("pipeline-nd-tts-probe");
  PipelineConfig config = fixture_config("nd.conf", first_out);
  run_nd_pipeline(config);
  data::ReadResult generated = data::read_jsonl(first_out / "generated.jsonl");

  auto features = testutil::scratch_dir("pipeline-nd-tts-features");
  jat::MeanEmbedding mean;
  mean.dim = 4;
  mean.vector = {0.5, 1.5, -0.5, 2.0};
  mean.n_frames_seen = 1;
  for (std::size_t i = 0; i + 1 < generated.records.size(); ++i) {
    // Leave the last id without a file to exercise the missing count.
    jat::write_feature_file(features / (generated.records[i].id + ".feat"),
                            jat::synth_representation("a b", mean, 2));
  }

  auto out = testutil::scratch_dir("pipeline-nd-tts");
  config = fixture_config("nd.conf", out);
  config.repr = "tts";
  config.tts_features_dir = features;
  PipelineReport report = run_nd_pipeline(config);
  CHECK(report.json["repr"]["kind"] == "tts");
  CHECK(report.json["repr"]["missing"] == 1);
  data::ReadResult tts_records = data::read_jsonl(out / "generated.jsonl");
  CHECK(tts_records.records.size() + 1 == generated.records.size());
  for (const Record& record : tts_records.records) {
    CHECK(record.repr == "tts");
  }
}
