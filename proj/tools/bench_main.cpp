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

// Compares the OpenMP kernels against their serial references on
// synthetic loads:
//
//   semforge_bench [repeats]
//
// Workloads: JAT mean accumulation, exact-match evaluation, intent-word
// counting, batch parse repair.

#include <omp.h>

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "semforge/corpus_stats.hpp"
#include "semforge/gateway.hpp"
#include "semforge/jat.hpp"
#include "semforge/metrics.hpp"
#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "semforge/prompts.hpp"
#include "semforge/record.hpp"
#include "semforge/repair.hpp"
#include "semforge/rng.hpp"

using namespace semforge;

namespace {

double time_best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    double start = omp_get_wtime();
    fn();
    double elapsed = omp_get_wtime() - start;
    if (elapsed < best) best = elapsed;
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-22s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

std::vector<jat::EmbeddingMatrix> make_store(std::size_t utterances, int dim) {
  Lcg64 rng(42);
  std::vector<jat::EmbeddingMatrix> store;
  store.reserve(utterances);
  for (std::size_t i = 0; i < utterances; ++i) {
    jat::EmbeddingMatrix m;
    m.dim = dim;
    std::size_t frames = 4 + rng.bounded(28);
    m.data.resize(frames * dim);
    for (float& v : m.data) v = static_cast<float>(rng.uniform01() * 2.0 - 1.0);
    store.push_back(std::move(m));
  }
  return store;
}

const char* kIntents[] = {"IN:GET_WEATHER", "IN:PLAY_MUSIC", "IN:CREATE_ALARM",
                          "IN:GET_EVENT", "IN:SEND_MESSAGE"};
const char* kWords[] = {"weather", "music",  "alarm",  "event",   "message", "boston",
                        "tomorrow", "please", "the",   "in",      "play",    "send",
                        "forecast", "rain",   "paris", "morning", "timer",   "next"};

std::vector<Record> make_corpus(std::size_t n) {
  Lcg64 rng(7);
  std::vector<Record> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string transcript;
    std::size_t len = 4 + rng.bounded(10);
    for (std::size_t w = 0; w < len; ++w) {
      if (w) transcript += ' ';
      transcript += kWords[rng.bounded(std::size(kWords))];
    }
    Record record;
    record.id = "bench-" + std::to_string(i);
    record.domain = "weather";
    record.transcript = transcript;
    record.seqlogical = std::string("[") + kIntents[rng.bounded(std::size(kIntents))] + " " +
                        transcript + " ]";
    record.source = "stop";
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<metrics::EvalItem> make_eval(std::size_t n) {
  Lcg64 rng(11);
  auto corpus = make_corpus(n);
  std::vector<metrics::EvalItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    metrics::EvalItem item;
    item.reference_parse = corpus[i].seqlogical;
    item.hypothesis_parse =
        rng.bounded(2) ? corpus[i].seqlogical : corpus[rng.bounded(n)].seqlogical;
    item.reference_transcript = corpus[i].transcript;
    if (rng.bounded(2)) {
      item.asr_hypothesis = rng.bounded(2) ? corpus[i].transcript
                                           : corpus[i].transcript + " extra";
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), repeats);

  {
    auto store = make_store(20000, 40);
    volatile double sink = 0;
    double serial = time_best_of(repeats, [&] {
      sink = jat::compute_mean_embedding_serial(store).vector[0];
    });
    double parallel = time_best_of(repeats, [&] {
      sink = jat::compute_mean_embedding(store).vector[0];
    });
    (void)sink;
    report("jat mean", serial, parallel);
  }
  {
    auto items = make_eval(40000);
    volatile double sink = 0;
    double serial =
        time_best_of(repeats, [&] { sink = metrics::em_report_serial(items).em; });
    double parallel = time_best_of(repeats, [&] { sink = metrics::em_report(items).em; });
    (void)sink;
    report("em report", serial, parallel);
  }
  {
    auto corpus = make_corpus(60000);
    std::set<std::string> stopwords = {"the", "in", "please"};
    volatile std::size_t sink = 0;
    double serial = time_best_of(repeats, [&] {
      sink = stats::build_intent_word_table_serial(corpus, stopwords, 40).entries.size();
    });
    double parallel = time_best_of(repeats, [&] {
      sink = stats::build_intent_word_table(corpus, stopwords, 40).entries.size();
    });
    (void)sink;
    report("intent-word table", serial, parallel);
  }
  {
    Ontology ontology = parse_ontology(
        "INTENT IN:GET_WEATHER\nSLOT SL:LOCATION\nSLOT SL:ORDINAL\n"
        "COMBO IN:GET_WEATHER\nCOMBO IN:GET_WEATHER SL:LOCATION\n",
        "bench");
    llm::MockParams params;
    params.kind = prompts::PromptKind::kEpParse;
    params.intent = "IN:GET_WEATHER";
    params.slots = {"SL:LOCATION"};
    params.n = 40000;
    auto lines = prompts::parse_numbered_response({}, llm::mock_generate(params, 3)).lines;
    volatile std::size_t sink = 0;
    double serial = time_best_of(repeats, [&] {
      sink = repair::repair_batch_serial(lines, "IN:GET_WEATHER", ontology).stats.accepted;
    });
    double parallel = time_best_of(repeats, [&] {
      sink = repair::repair_batch(lines, "IN:GET_WEATHER", ontology).stats.accepted;
    });
    (void)sink;
    report("repair batch", serial, parallel);
  }
  return 0;
}
