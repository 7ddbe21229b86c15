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

#include "semforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <unordered_set>

#include "semforge/corpus_stats.hpp"
#include "semforge/dataset.hpp"
#include "semforge/jat.hpp"
#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "semforge/prompts.hpp"
#include "semforge/pseudolabel.hpp"
#include "semforge/record.hpp"
#include "semforge/repair.hpp"
#include "semforge/rng.hpp"
#include "semforge/textnorm.hpp"

namespace semforge::pipeline {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("expected a boolean, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& value) {
  return std::stoull(value);
}

std::string sequential_id(const char* prefix, std::size_t n) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%06zu", n);
  return std::string(prefix) + buffer;
}

// Feature files referenced by corpus records, resolved against the corpus
// file's directory.
std::vector<std::filesystem::path> paired_feature_paths(std::span<const Record> records,
                                                        const std::filesystem::path& corpus) {
  std::vector<std::filesystem::path> paths;
  std::filesystem::path base = corpus.parent_path();
  for (const Record& record : records) {
    if (record.embedding_ref) paths.push_back(base / *record.embedding_ref);
  }
  return paths;
}

struct LoadedInputs {
  std::vector<Record> corpus;
  Ontology ontology;
  prompts::TemplateSet templates;
};

LoadedInputs load_inputs(const PipelineConfig& config) {
  LoadedInputs inputs;
  try {
    data::ReadResult read = data::read_jsonl(config.corpus, config.lenient);
    inputs.corpus = std::move(read.records);
  } catch (const std::exception& e) {
    throw PipelineError("load_corpus", e.what(), 2);
  }
  try {
    inputs.ontology = load_ontology(config.ontology);
  } catch (const std::exception& e) {
    throw PipelineError("load_ontology", e.what(), 2);
  }
  try {
    inputs.templates = prompts::TemplateSet::load(config.templates_dir);
  } catch (const std::exception& e) {
    throw PipelineError("load_templates", e.what(), 2);
  }
  return inputs;
}

std::shared_ptr<llm::Backend> make_backend(const PipelineConfig& config) {
  if (config.backend == "mock") return std::make_shared<llm::MockBackend>();
  if (config.backend == "remote") {
    return std::make_shared<llm::RemoteBackend>(config.gateway);
  }
  throw PipelineError("config", "unknown backend '" + config.backend + "'", 2);
}

std::unique_ptr<label::PseudoLabeler> make_labeler(const PipelineConfig& config) {
  if (config.labeler_backend == "mock") {
    try {
      return std::make_unique<label::RuleMockLabeler>(
          label::RuleMockLabeler::from_file(config.labeler));
    } catch (const std::exception& e) {
      throw PipelineError("load_labeler", e.what(), 2);
    }
  }
  if (config.labeler_backend == "remote") {
    if (config.labeler_endpoint.empty()) {
      throw PipelineError("config", "remote labeler needs labeler_endpoint", 2);
    }
    return std::make_unique<label::RemoteLabeler>(config.labeler_endpoint);
  }
  throw PipelineError("config", "unknown labeler backend '" + config.labeler_backend + "'", 2);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& json) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << json.dump(2) << '\n';
}

// Best effort: anything already produced goes under partial/.
void dump_partial(const PipelineConfig& config, std::span<const Record> records) {
  try {
    if (records.empty()) return;
    data::write_jsonl(records, config.out_dir / "partial" / "records.jsonl");
  } catch (...) {
  }
}

// Elapsed milliseconds per stage for the structured log (stderr only;
// nothing timed ever lands in the output tree).
class StageClock {
 public:
  std::int64_t lap_ms() {
    auto now = std::chrono::steady_clock::now();
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(now - last_);
    last_ = now;
    return elapsed.count();
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

llm::GenerationRequest make_request(const PipelineConfig& config, const std::string& prompt) {
  llm::GenerationRequest request;
  request.prompt = prompt;
  request.max_tokens = config.max_tokens;
  request.temperature = config.temperature;
  request.seed = config.seed;
  return request;
}

struct GenLine {
  std::string strategy;  // "iwp" | "ep"
  std::string desired_intent;
  std::string normalized;
};

std::string combo_key(const std::string& intent, const std::set<std::string>& slots) {
  std::string key = intent;
  for (const std::string& slot : slots) key += " " + slot;
  return key;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  PipelineConfig config;
  std::filesystem::path base = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string trimmed = trim_copy(line);
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim_copy(trimmed.substr(0, eq));
    std::string value = trim_copy(trimmed.substr(eq + 1));
    try {
      apply_override(config, key, value);
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Relative paths are relative to the config file.
  auto rebase = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  rebase(config.corpus);
  rebase(config.ontology);
  rebase(config.stopwords);
  rebase(config.templates_dir);
  rebase(config.labeler);
  rebase(config.tts_features_dir);
  rebase(config.out_dir);
  return config;
}

void apply_override(PipelineConfig& config, const std::string& key, const std::string& value) {
  if (key == "mode") config.mode = value;
  else if (key == "backend") config.backend = value;
  else if (key == "corpus") config.corpus = value;
  else if (key == "ontology") config.ontology = value;
  else if (key == "stopwords") config.stopwords = value;
  else if (key == "templates_dir") config.templates_dir = value;
  else if (key == "labeler") config.labeler = value;
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "labeler_backend") config.labeler_backend = value;
  else if (key == "labeler_endpoint") config.labeler_endpoint = value;
  else if (key == "k_intent_words") config.k_intent_words = std::stoi(value);
  else if (key == "n_iwp") config.n_iwp = std::stoi(value);
  else if (key == "n_ep") config.n_ep = std::stoi(value);
  else if (key == "n_ep_parse") config.n_ep_parse = std::stoi(value);
  else if (key == "ep_examples_max") config.ep_examples_max = std::stoi(value);
  else if (key == "k_examples") config.k_examples = std::stoi(value);
  else if (key == "frames_per_token") config.frames_per_token = std::stoi(value);
  else if (key == "seed") config.seed = parse_u64(value);
  else if (key == "repr") config.repr = value;
  else if (key == "tts_features_dir") config.tts_features_dir = value;
  else if (key == "dry_run") config.dry_run = parse_bool(value);
  else if (key == "lenient") config.lenient = parse_bool(value);
  else if (key == "temperature") config.temperature = std::stod(value);
  else if (key == "max_tokens") config.max_tokens = std::stoi(value);
  else if (key == "endpoint") config.gateway.endpoint = value;
  else if (key == "model") config.gateway.model = value;
  else if (key == "api_key_env") config.gateway.api_key_env = value;
  else if (key == "context_budget") config.gateway.context_budget_tokens = std::stoi(value);
  else if (key == "concurrency") config.gateway.concurrency = std::stoi(value);
  else if (key == "retry_cap") config.gateway.retry_cap = std::stoi(value);
  else if (key == "backoff_base_ms") config.gateway.backoff_base_ms = std::stoi(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

PipelineReport run_ed_pipeline(const PipelineConfig& config, JsonlLogger* logger) {
  JsonlLogger null_logger;
  JsonlLogger& log = logger ? *logger : null_logger;
  StageClock clock;
  auto stage_log = [&](std::string_view stage, nlohmann::ordered_json fields) {
    fields["seed"] = config.seed;
    fields["elapsed_ms"] = clock.lap_ms();
    log.log(stage, std::move(fields));
  };
  stage_log("start", {{"mode", "ed"}, {"backend", config.backend}});
  LoadedInputs inputs = load_inputs(config);

  std::set<std::string> stopwords;
  try {
    stopwords = stats::load_stopwords(config.stopwords);
  } catch (const std::exception& e) {
    throw PipelineError("load_stopwords", e.what(), 2);
  }
  std::vector<prompts::IntentDescription> descriptions;
  try {
    descriptions =
        prompts::load_intent_descriptions(config.templates_dir / "intent_descriptions.txt");
  } catch (const std::exception& e) {
    throw PipelineError("load_templates", e.what(), 2);
  }
  auto labeler = make_labeler(config);

  nlohmann::ordered_json report;
  report["mode"] = "ed";
  report["seed"] = config.seed;
  report["backend"] = config.backend;
  report["corpus_records"] = inputs.corpus.size();

  // Intent-word table.
  stats::IntentWordTable table;
  if (config.k_intent_words > 0 && config.n_iwp > 0) {
    try {
      table = stats::build_intent_word_table(inputs.corpus, stopwords, config.k_intent_words);
    } catch (const std::exception& e) {
      throw PipelineError("intent_word_table", e.what());
    }
  }
  stage_log("intent_word_table", {{"intents", table.entries.size()}});

  // Prompt schedule: IWP over intents x top-k words, EP over intent-slot
  // combinations with up to ep_examples_max random example transcripts.
  struct PlanEntry {
    std::string strategy;
    std::string intent;
    std::string word;
    std::set<std::string> slots;
    std::vector<std::string> example_ids;
    std::vector<std::string> example_texts;
    int n = 0;
  };
  std::vector<PlanEntry> plan;
  for (const auto& [intent, words] : table.entries) {
    for (const auto& [word, count] : words) {
      PlanEntry entry;
      entry.strategy = "iwp";
      entry.intent = intent;
      entry.word = word;
      entry.n = config.n_iwp;
      plan.push_back(std::move(entry));
    }
  }
  if (config.n_ep > 0) {
    stats::ComboTable combos;
    try {
      combos = stats::build_combo_table(inputs.corpus);
    } catch (const std::exception& e) {
      throw PipelineError("combo_table", e.what());
    }
    // Record indices per combo for example sampling.
    std::map<std::string, std::vector<std::size_t>> by_combo;
    for (std::size_t i = 0; i < inputs.corpus.size(); ++i) {
      SeqlogicalParse parse = parse_seqlogical(inputs.corpus[i].seqlogical);
      by_combo[combo_key(top_intent(parse), slot_label_set(parse))].push_back(i);
    }
    for (const auto& [intent, slot_sets] : combos.entries) {
      for (const auto& slots : slot_sets) {
        std::string key = combo_key(intent, slots);
        auto& indices = by_combo[key];
        Lcg64 rng(config.seed ^ fnv1a64("ep " + key));
        deterministic_shuffle(indices, rng);
        PlanEntry entry;
        entry.strategy = "ep";
        entry.intent = intent;
        entry.slots = slots;
        entry.n = config.n_ep;
        std::size_t take = std::min<std::size_t>(indices.size(),
                                                 static_cast<std::size_t>(config.ep_examples_max));
        for (std::size_t i = 0; i < take; ++i) {
          entry.example_ids.push_back(inputs.corpus[indices[i]].id);
          entry.example_texts.push_back(inputs.corpus[indices[i]].transcript);
        }
        if (!entry.example_texts.empty()) plan.push_back(std::move(entry));
      }
    }
  }

  nlohmann::ordered_json plan_json = nlohmann::ordered_json::array();
  std::size_t iwp_prompts = 0;
  std::size_t ep_prompts = 0;
  for (const PlanEntry& entry : plan) {
    nlohmann::ordered_json item;
    item["strategy"] = entry.strategy;
    item["intent"] = entry.intent;
    if (entry.strategy == "iwp") {
      item["word"] = entry.word;
      ++iwp_prompts;
    } else {
      item["slots"] = entry.slots;
      item["example_ids"] = entry.example_ids;
      ++ep_prompts;
    }
    item["n"] = entry.n;
    plan_json.push_back(std::move(item));
  }
  std::filesystem::create_directories(config.out_dir);
  write_json_file(config.out_dir / "plan.json", plan_json);
  report["plan"] = {{"iwp_prompts", iwp_prompts}, {"ep_prompts", ep_prompts}};
  stage_log("plan", {{"iwp_prompts", iwp_prompts}, {"ep_prompts", ep_prompts}});

  if (config.dry_run) {
    report["dry_run"] = true;
    write_json_file(config.out_dir / "report.json", report);
    return {report};
  }

  // Generation.
  std::vector<prompts::PromptSpec> specs;
  std::vector<llm::GenerationRequest> requests;
  try {
    for (const PlanEntry& entry : plan) {
      prompts::PromptSpec spec;
      if (entry.strategy == "iwp") {
        spec = prompts::build_iwp_prompt(inputs.ontology, entry.intent, entry.word,
                                         descriptions, entry.n, inputs.templates);
      } else {
        spec = prompts::build_ep_transcript_prompt(entry.example_texts, entry.n,
                                                   inputs.templates);
        spec.target_intent = entry.intent;
      }
      requests.push_back(make_request(config, spec.rendered));
      specs.push_back(std::move(spec));
    }
  } catch (const std::exception& e) {
    throw PipelineError("build_prompts", e.what());
  }

  llm::Gateway gateway(make_backend(config), config.gateway, logger);
  std::vector<llm::GenerationResponse> responses;
  try {
    responses = gateway.complete_batch(requests);
  } catch (const llm::GatewayError& e) {
    throw PipelineError("generate", e.what(), 3);
  }
  stage_log("generate", {{"prompts", requests.size()}});

  // Response parsing, normalization, dedup.
  std::vector<GenLine> lines;
  std::size_t raw_lines = 0;
  std::size_t rejected_lines = 0;
  std::size_t empty_normalized = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    prompts::GenerationBatch batch =
        prompts::parse_numbered_response(specs[i], responses[i].text);
    raw_lines += batch.lines.size();
    rejected_lines += batch.rejected.size();
    for (const std::string& line : batch.lines) {
      GenLine gen;
      gen.strategy = specs[i].kind == prompts::PromptKind::kIwp ? "iwp" : "ep";
      gen.desired_intent = specs[i].target_intent;
      gen.normalized = normalize(line);
      if (gen.normalized.empty()) {
        ++empty_normalized;
        continue;
      }
      lines.push_back(std::move(gen));
    }
  }
  std::size_t before_dedup = lines.size();
  {
    std::unordered_set<std::string> seen;
    std::vector<GenLine> unique_lines;
    unique_lines.reserve(lines.size());
    for (GenLine& line : lines) {
      if (seen.insert(line.normalized).second) unique_lines.push_back(std::move(line));
    }
    lines = std::move(unique_lines);
  }
  report["generation"] = {{"lines", raw_lines},
                          {"rejected", rejected_lines},
                          {"empty_after_normalize", empty_normalized},
                          {"dedup_in", before_dedup},
                          {"dedup_out", lines.size()}};
  stage_log("dedup", {{"in", before_dedup}, {"out", lines.size()}});

  // Pseudo-labeling and IMA.
  std::vector<Record> generated;
  std::vector<std::pair<std::string, std::string>> ima_iwp;
  std::vector<std::pair<std::string, std::string>> ima_ep;
  std::size_t labeler_failures = 0;
  std::size_t domain_unknown = 0;
  try {
    for (const GenLine& line : lines) {
      SeqlogicalParse parse;
      try {
        parse = labeler->label(line.normalized);
      } catch (const label::LabelerError& e) {
        if (e.kind() == label::LabelerError::Kind::kUnavailable) {
          throw PipelineError("pseudolabel", e.what(), 3);
        }
        ++labeler_failures;
        continue;
      }
      std::string intent = top_intent(parse);
      (line.strategy == "iwp" ? ima_iwp : ima_ep).push_back({line.desired_intent, intent});
      auto domain = inputs.ontology.domain_of(intent);
      if (!domain) {
        ++domain_unknown;
        continue;
      }
      Record record;
      record.id = sequential_id("ed-gen-", generated.size());
      record.domain = *domain;
      record.transcript = line.normalized;
      record.seqlogical = serialize(parse);
      record.source = line.strategy == "iwp" ? kSourceLlmIwp : kSourceLlmEp;
      generated.push_back(std::move(record));
    }
  } catch (const PipelineError&) {
    dump_partial(config, generated);
    throw;
  }

  nlohmann::ordered_json ima_json;
  if (!ima_iwp.empty()) ima_json["iwp"] = label::intent_match_accuracy_labels(ima_iwp);
  if (!ima_ep.empty()) ima_json["ep"] = label::intent_match_accuracy_labels(ima_ep);
  {
    std::vector<std::pair<std::string, std::string>> all(ima_iwp);
    all.insert(all.end(), ima_ep.begin(), ima_ep.end());
    if (!all.empty()) ima_json["overall"] = label::intent_match_accuracy_labels(all);
  }
  report["pseudolabel"] = {{"labeled", ima_iwp.size() + ima_ep.size()},
                           {"labeler_failures", labeler_failures},
                           {"domain_unknown", domain_unknown}};
  report["ima"] = ima_json;
  stage_log("pseudolabel", {{"labeled", ima_iwp.size() + ima_ep.size()}});

  // JAT attachment over the paired portion of the corpus.
  if (!generated.empty()) {
    std::vector<std::filesystem::path> paths =
        paired_feature_paths(inputs.corpus, config.corpus);
    if (paths.empty()) {
      dump_partial(config, generated);
      throw PipelineError("jat", "corpus has no paired embeddings to average");
    }
    jat::MeanEmbedding mean;
    try {
      mean = jat::compute_mean_embedding_files(paths);
      jat::AttachResult attached = jat::attach_representations(
          generated, mean, config.frames_per_token, config.out_dir);
      generated = std::move(attached.records);
      report["jat"] = {{"paired_files", paths.size()},
                       {"mean_frames", mean.n_frames_seen},
                       {"frames_per_token", config.frames_per_token},
                       {"attached", attached.written},
                       {"skipped", attached.skipped}};
    } catch (const std::exception& e) {
      dump_partial(config, generated);
      throw PipelineError("jat", e.what());
    }
  } else {
    report["jat"] = {{"attached", 0}};
  }

  // Outputs.
  try {
    data::write_jsonl(generated, config.out_dir / "generated.jsonl");
    std::vector<Record> augmented = inputs.corpus;
    augmented.insert(augmented.end(), generated.begin(), generated.end());
    data::write_jsonl(augmented, config.out_dir / "augmented.jsonl");
    report["outputs"] = {{"generated", generated.size()}, {"augmented", augmented.size()}};
  } catch (const std::exception& e) {
    dump_partial(config, generated);
    throw PipelineError("write", e.what());
  }
  write_json_file(config.out_dir / "report.json", report);
  stage_log("done", {{"generated", generated.size()}});
  return {report};
}

PipelineReport run_nd_pipeline(const PipelineConfig& config, JsonlLogger* logger) {
  JsonlLogger null_logger;
  JsonlLogger& log = logger ? *logger : null_logger;
  StageClock clock;
  auto stage_log = [&](std::string_view stage, nlohmann::ordered_json fields) {
    fields["seed"] = config.seed;
    fields["elapsed_ms"] = clock.lap_ms();
    log.log(stage, std::move(fields));
  };
  stage_log("start", {{"mode", "nd"}, {"backend", config.backend}});
  LoadedInputs inputs = load_inputs(config);

  nlohmann::ordered_json report;
  report["mode"] = "nd";
  report["seed"] = config.seed;
  report["backend"] = config.backend;
  report["corpus_records"] = inputs.corpus.size();

  data::WeatherHoldout holdout;
  try {
    holdout = data::weather_holdout(inputs.corpus, config.k_examples, config.seed);
  } catch (const std::exception& e) {
    throw PipelineError("weather_holdout", e.what());
  }
  report["holdout"] = {{"seen", holdout.seen.size()},
                       {"seed_examples", holdout.seed_examples.size()},
                       {"hidden", holdout.hidden.size()}};
  stage_log("weather_holdout", {{"seen", holdout.seen.size()},
                              {"seed_examples", holdout.seed_examples.size()},
                              {"hidden", holdout.hidden.size()}});

  // One EP parse prompt per seeded combination.
  struct ComboPlan {
    std::string intent;
    std::set<std::string> slots;
    std::vector<SeqlogicalParse> examples;
    std::vector<std::string> example_ids;
  };
  std::map<std::string, ComboPlan> combos;
  for (const Record& record : holdout.seed_examples) {
    SeqlogicalParse parse = parse_seqlogical(record.seqlogical);
    std::string key = combo_key(top_intent(parse), slot_label_set(parse));
    ComboPlan& combo = combos[key];
    combo.intent = top_intent(parse);
    combo.slots = slot_label_set(parse);
    if (combo.examples.size() < static_cast<std::size_t>(prompts::kMaxEpParseExamples)) {
      combo.examples.push_back(parse);
      combo.example_ids.push_back(record.id);
    }
  }

  nlohmann::ordered_json plan_json = nlohmann::ordered_json::array();
  for (const auto& [key, combo] : combos) {
    plan_json.push_back(nlohmann::ordered_json{{"strategy", "ep_parse"},
                                               {"intent", combo.intent},
                                               {"slots", combo.slots},
                                               {"example_ids", combo.example_ids},
                                               {"n", config.n_ep_parse}});
  }
  std::filesystem::create_directories(config.out_dir);
  write_json_file(config.out_dir / "plan.json", plan_json);
  report["plan"] = {{"ep_parse_prompts", combos.size()}};

  if (config.dry_run) {
    report["dry_run"] = true;
    write_json_file(config.out_dir / "report.json", report);
    return {report};
  }

  std::vector<prompts::PromptSpec> specs;
  std::vector<llm::GenerationRequest> requests;
  try {
    for (const auto& [key, combo] : combos) {
      prompts::PromptSpec spec = prompts::build_ep_parse_prompt(
          combo.intent, combo.slots, combo.examples, config.n_ep_parse, inputs.templates);
      requests.push_back(make_request(config, spec.rendered));
      specs.push_back(std::move(spec));
    }
  } catch (const std::exception& e) {
    throw PipelineError("build_prompts", e.what());
  }

  llm::Gateway gateway(make_backend(config), config.gateway, logger);
  std::vector<llm::GenerationResponse> responses;
  try {
    responses = gateway.complete_batch(requests);
  } catch (const llm::GatewayError& e) {
    throw PipelineError("generate", e.what(), 3);
  }
  stage_log("generate", {{"prompts", requests.size()}});

  // Repair with one reprompt round per failing line.
  repair::RepairStats stats;
  std::size_t lines_in = 0;
  std::size_t rejected_lines = 0;
  std::size_t reprompted = 0;
  std::size_t reprompt_recovered = 0;
  std::vector<Record> generated;
  nlohmann::ordered_json yield_per_combo;
  try {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      prompts::GenerationBatch batch =
          prompts::parse_numbered_response(specs[i], responses[i].text);
      rejected_lines += batch.rejected.size();
      lines_in += batch.lines.size();
      repair::RepairBatchResult result =
          repair::repair_batch(batch.lines, specs[i].target_intent, inputs.ontology);
      stats.merge(result.stats);

      std::vector<repair::RepairOutcome> kept;
      for (repair::RepairOutcome& outcome : result.outcomes) {
        if (outcome.status == repair::RepairStatus::kAccepted ||
            outcome.status == repair::RepairStatus::kRepaired) {
          kept.push_back(std::move(outcome));
          continue;
        }
        if (outcome.status != repair::RepairStatus::kNeedsReprompt) continue;
        ++reprompted;
        prompts::PromptSpec reprompt =
            repair::build_reprompt(outcome, specs[i], inputs.ontology, inputs.templates);
        llm::GenerationResponse response;
        try {
          response = gateway.complete(make_request(config, reprompt.rendered));
        } catch (const llm::GatewayError& e) {
          throw PipelineError("reprompt", e.what(), 3);
        }
        prompts::GenerationBatch fixed_batch =
            prompts::parse_numbered_response(reprompt, response.text);
        if (fixed_batch.lines.empty()) continue;
        repair::RepairOutcome fixed = repair::repair_generated_parse(
            fixed_batch.lines[0], specs[i].target_intent, inputs.ontology);
        if (fixed.status == repair::RepairStatus::kAccepted ||
            fixed.status == repair::RepairStatus::kRepaired) {
          ++reprompt_recovered;
          kept.push_back(std::move(fixed));
        }
      }

      std::size_t combo_yield = 0;
      for (const repair::RepairOutcome& outcome : kept) {
        std::string transcript = extract_transcript(*outcome.parse);
        if (normalize(transcript) != transcript) {
          // Not spoken-form stable; dropping keeps the record invariant.
          continue;
        }
        Record record;
        record.id = sequential_id("nd-gen-", generated.size());
        record.domain = "weather";
        record.transcript = transcript;
        record.seqlogical = serialize(*outcome.parse);
        record.source = kSourceLlmEpParse;
        generated.push_back(std::move(record));
        ++combo_yield;
      }
      yield_per_combo[combo_key(specs[i].target_intent, specs[i].slots)] = combo_yield;
    }
  } catch (const PipelineError&) {
    dump_partial(config, generated);
    throw;
  }

  std::size_t normalization_dropped = stats.accepted + stats.repaired + reprompt_recovered;
  normalization_dropped -= generated.size();
  report["repair"] = stats.to_json();
  report["repair"]["lines_in"] = lines_in;
  report["repair"]["rejected_lines"] = rejected_lines;
  report["repair"]["reprompted"] = reprompted;
  report["repair"]["reprompt_recovered"] = reprompt_recovered;
  report["repair"]["normalization_dropped"] = normalization_dropped;
  report["yield_per_combo"] = yield_per_combo;
  stage_log("repair", {{"lines_in", lines_in},
                     {"accepted", stats.accepted},
                     {"repaired", stats.repaired},
                     {"discarded", stats.discarded},
                     {"needs_reprompt", stats.needs_reprompt}});

  // Representations for the generated weather data.
  if (!generated.empty()) {
    if (config.repr == "jat") {
      std::vector<std::filesystem::path> paths =
          paired_feature_paths(holdout.seen, config.corpus);
      if (paths.empty()) {
        dump_partial(config, generated);
        throw PipelineError("jat", "seen domains have no paired embeddings to average");
      }
      try {
        jat::MeanEmbedding mean = jat::compute_mean_embedding_files(paths);
        jat::AttachResult attached = jat::attach_representations(
            generated, mean, config.frames_per_token, config.out_dir);
        generated = std::move(attached.records);
        report["repr"] = {{"kind", "jat"},
                          {"paired_files", paths.size()},
                          {"mean_frames", mean.n_frames_seen},
                          {"frames_per_token", config.frames_per_token},
                          {"attached", attached.written},
                          {"skipped", attached.skipped}};
      } catch (const std::exception& e) {
        dump_partial(config, generated);
        throw PipelineError("jat", e.what());
      }
    } else if (config.repr == "tts") {
      // Externally synthesized features, ingested by record id.
      std::size_t attached = 0;
      std::size_t missing = 0;
      std::vector<Record> with_features;
      std::filesystem::create_directories(config.out_dir / "feat");
      for (Record& record : generated) {
        std::filesystem::path source = config.tts_features_dir / (record.id + ".feat");
        if (!std::filesystem::exists(source)) {
          ++missing;
          continue;
        }
        jat::EmbeddingMatrix matrix = jat::read_feature_file(source);
        std::string relative = "feat/" + record.id + ".feat";
        jat::write_feature_file(config.out_dir / relative, matrix);
        record.embedding_ref = relative;
        record.repr = "tts";
        with_features.push_back(std::move(record));
        ++attached;
      }
      generated = std::move(with_features);
      report["repr"] = {{"kind", "tts"}, {"attached", attached}, {"missing", missing}};
    } else {
      throw PipelineError("config", "unknown repr '" + config.repr + "'", 2);
    }
  } else {
    report["repr"] = {{"attached", 0}};
  }

  // Outputs: generated data, the augmented training set, the hidden
  // weather evaluation set, and the holdout manifest.
  try {
    data::write_jsonl(generated, config.out_dir / "generated.jsonl");
    std::vector<Record> augmented = holdout.seen;
    for (Record record : holdout.seed_examples) {
      record.source = kSourceSeedExample;
      augmented.push_back(std::move(record));
    }
    augmented.insert(augmented.end(), generated.begin(), generated.end());
    data::write_jsonl(augmented, config.out_dir / "augmented.jsonl");
    data::write_jsonl(holdout.hidden, config.out_dir / "hidden.jsonl");
    write_json_file(config.out_dir / "manifest.json", holdout.to_json());
    report["outputs"] = {{"generated", generated.size()},
                         {"augmented", augmented.size()},
                         {"hidden", holdout.hidden.size()}};
  } catch (const std::exception& e) {
    dump_partial(config, generated);
    throw PipelineError("write", e.what());
  }
  write_json_file(config.out_dir / "report.json", report);
  stage_log("done", {{"generated", generated.size()}});
  return {report};
}

}  // namespace semforge::pipeline
