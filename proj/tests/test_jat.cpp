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

#include <cmath>

#include "semforge/jat.hpp"
#include "testutil.hpp"

using namespace semforge;
using namespace semforge::jat;

namespace {

EmbeddingMatrix matrix(int dim, std::initializer_list<std::initializer_list<float>> rows) {
  EmbeddingMatrix m;
  m.dim = dim;
  for (const auto& row : rows) {
    for (float v : row) m.data.push_back(v);
  }
  return m;
}

std::vector<EmbeddingMatrix> random_store(std::uint64_t seed, std::size_t utterances,
                                          int dim) {
  Lcg64 rng(seed);
  std::vector<EmbeddingMatrix> store;
  for (std::size_t i = 0; i < utterances; ++i) {
    EmbeddingMatrix m;
    m.dim = dim;
    std::size_t frames = 1 + rng.bounded(12);
    for (std::size_t f = 0; f < frames * static_cast<std::size_t>(dim); ++f) {
      m.data.push_back(static_cast<float>(rng.uniform01() * 4.0 - 2.0));
    }
    store.push_back(std::move(m));
  }
  return store;
}

}  // namespace

TEST_CASE("mean of a single utterance") {
  auto store = std::vector<EmbeddingMatrix>{matrix(2, {{1, 2}, {3, 4}})};
  MeanEmbedding mean = compute_mean_embedding(store);
  CHECK(mean.dim == 2);
  CHECK(mean.n_frames_seen == 2);
  CHECK(mean.vector[0] == doctest::Approx(2.0));
  CHECK(mean.vector[1] == doctest::Approx(3.0));
}

TEST_CASE("mean is frame weighted, not utterance weighted") {
  auto store = std::vector<EmbeddingMatrix>{matrix(2, {{1, 2}}),
                                            matrix(2, {{3, 4}, {5, 6}})};
  MeanEmbedding mean = compute_mean_embedding(store);
  CHECK(mean.n_frames_seen == 3);
  CHECK(mean.vector[0] == doctest::Approx(3.0));
  CHECK(mean.vector[1] == doctest::Approx(4.0));
}

TEST_CASE("mixed dims and empty stores are rejected") {
  auto mixed = std::vector<EmbeddingMatrix>{matrix(2, {{1, 2}}), matrix(3, {{1, 2, 3}})};
  CHECK_THROWS_AS(compute_mean_embedding(mixed), JatError);
  std::vector<EmbeddingMatrix> empty;
  CHECK_THROWS_AS(compute_mean_embedding(empty), JatError);
  CHECK_THROWS_AS(compute_mean_embedding_serial(empty), JatError);
}

TEST_CASE("parallel mean matches the serial reference") {
  auto store = random_store(2025, 400, 16);
  MeanEmbedding a = compute_mean_embedding(store);
  MeanEmbedding b = compute_mean_embedding_serial(store);
  REQUIRE(a.dim == b.dim);
  CHECK(a.n_frames_seen == b.n_frames_seen);
  for (int d = 0; d < a.dim; ++d) {
    CHECK(a.vector[d] == doctest::Approx(b.vector[d]).epsilon(1e-9));
  }
}

TEST_CASE("mean is invariant to utterance order and rechunking") {
  auto store = random_store(7, 200, 8);
  MeanEmbedding base = compute_mean_embedding(store);

  Lcg64 rng(3);
  deterministic_shuffle(store, rng);
  MeanEmbedding shuffled = compute_mean_embedding(store);

  // Flatten then split at arbitrary frame boundaries.
  std::vector<float> flat;
  for (const EmbeddingMatrix& m : store) flat.insert(flat.end(), m.data.begin(), m.data.end());
  std::vector<EmbeddingMatrix> rechunked;
  std::size_t total_frames = flat.size() / 8;
  std::size_t consumed = 0;
  while (consumed < total_frames) {
    std::size_t take = std::min<std::size_t>(1 + rng.bounded(17), total_frames - consumed);
    EmbeddingMatrix m;
    m.dim = 8;
    m.data.assign(flat.begin() + consumed * 8, flat.begin() + (consumed + take) * 8);
    rechunked.push_back(std::move(m));
    consumed += take;
  }
  MeanEmbedding rechunked_mean = compute_mean_embedding(rechunked);

  for (int d = 0; d < 8; ++d) {
    CHECK(std::abs(base.vector[d] - shuffled.vector[d]) < 1e-9);
    CHECK(std::abs(base.vector[d] - rechunked_mean.vector[d]) < 1e-9);
  }
}

TEST_CASE("synth representation repeats the mean row") {
  MeanEmbedding mean;
  mean.dim = 2;
  mean.vector = {2.0, 3.0};
  mean.n_frames_seen = 10;

  EmbeddingMatrix m = synth_representation("turn the lights on", mean, 2);
  CHECK(m.dim == 2);
  CHECK(m.frames() == 8);  // 4 tokens x 2 frames
  for (std::size_t f = 0; f < m.frames(); ++f) {
    CHECK(m.row(f)[0] == 2.0f);
    CHECK(m.row(f)[1] == 3.0f);
  }

  EmbeddingMatrix one = synth_representation("hello", mean, 1);
  CHECK(one.frames() == 1);

  CHECK_THROWS_AS(synth_representation("", mean, 2), JatError);
  CHECK_THROWS_AS(synth_representation("   ", mean, 2), JatError);
}

TEST_CASE("mean over synthesized matrices closes on the same vector") {
  auto store = random_store(99, 50, 4);
  MeanEmbedding mean = compute_mean_embedding(store);

  std::vector<EmbeddingMatrix> synth;
  synth.push_back(synth_representation("a b c", mean, 3));
  synth.push_back(synth_representation("d", mean, 5));
  MeanEmbedding closed = compute_mean_embedding(synth);
  for (int d = 0; d < 4; ++d) {
    CHECK(std::abs(closed.vector[d] - mean.vector[d]) < 1e-6);
  }
}

TEST_CASE("feature files round-trip bit-exactly") {
  auto dir = testutil::scratch_dir("jat-files");
  auto store = random_store(5, 3, 8);
  write_feature_file(dir / "a.feat", store[0]);
  EmbeddingMatrix back = read_feature_file(dir / "a.feat");
  CHECK(back.dim == store[0].dim);
  REQUIRE(back.data.size() == store[0].data.size());
  for (std::size_t i = 0; i < back.data.size(); ++i) {
    CHECK(back.data[i] == store[0].data[i]);  // 9 significant digits round-trip float32
  }

  // Header shape.
  std::string text = testutil::read_file(dir / "a.feat");
  CHECK(text.rfind("SEMFORGE-FEAT 1 8 ", 0) == 0);

  // Streaming mean over files equals the in-memory mean.
  write_feature_file(dir / "b.feat", store[1]);
  write_feature_file(dir / "c.feat", store[2]);
  std::vector<std::filesystem::path> paths = {dir / "a.feat", dir / "b.feat", dir / "c.feat"};
  MeanEmbedding streamed = compute_mean_embedding_files(paths);
  MeanEmbedding direct = compute_mean_embedding(store);
  for (int d = 0; d < 8; ++d) {
    CHECK(std::abs(streamed.vector[d] - direct.vector[d]) < 1e-6);
  }
}

TEST_CASE("attach writes deterministic feature files and updates records") {
  auto dir = testutil::scratch_dir("jat-attach");
  MeanEmbedding mean;
  mean.dim = 3;
  mean.vector = {0.25, -1.5, 2.0};
  mean.n_frames_seen = 42;

  std::vector<Record> records;
  for (int i = 0; i < 10; ++i) {
    Record r;
    r.id = "gen-" + std::to_string(i);
    r.domain = "weather";
    r.transcript = "what is the weather";
    r.seqlogical = "[IN:GET_WEATHER what is the weather ]";
    r.source = "llm_ep_parse";
    records.push_back(std::move(r));
  }
  Record empty;
  empty.id = "gen-empty";
  empty.domain = "weather";
  empty.transcript = "";
  empty.seqlogical = "[IN:GET_WEATHER ]";
  empty.source = "llm_ep_parse";
  records.push_back(empty);

  AttachResult result = attach_representations(records, mean, 4, dir);
  CHECK(result.written == 10);
  CHECK(result.skipped == 1);
  REQUIRE(result.records.size() == 11);
  for (std::size_t i = 0; i < 10; ++i) {
    REQUIRE(result.records[i].embedding_ref.has_value());
    CHECK(result.records[i].repr == "jat");
    CHECK(std::filesystem::exists(dir / *result.records[i].embedding_ref));
  }
  CHECK_FALSE(result.records[10].embedding_ref.has_value());

  // Re-running produces identical bytes.
  std::string first = testutil::read_file(dir / "feat" / "gen-0.feat");
  attach_representations(records, mean, 4, dir);
  CHECK(testutil::read_file(dir / "feat" / "gen-0.feat") == first);

  // Records that already carry a reference are a caller bug.
  CHECK_THROWS_AS(attach_representations(result.records, mean, 4, dir), Error);
}

TEST_CASE("mean file persistence keeps doubles") {
  auto dir = testutil::scratch_dir("jat-mean");
  MeanEmbedding mean;
  mean.dim = 2;
  mean.vector = {1.0 / 3.0, -2.0 / 7.0};
  mean.n_frames_seen = 1234;
  write_mean_file(dir / "mean.json", mean);
  MeanEmbedding back = read_mean_file(dir / "mean.json");
  CHECK(back.dim == 2);
  CHECK(back.n_frames_seen == 1234);
  CHECK(back.vector[0] == mean.vector[0]);
  CHECK(back.vector[1] == mean.vector[1]);
}
