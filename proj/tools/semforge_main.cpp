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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "semforge/corpus_stats.hpp"
#include "semforge/dataset.hpp"
#include "semforge/gateway.hpp"
#include "semforge/jat.hpp"
#include "semforge/metrics.hpp"
#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"
#include "semforge/pipeline.hpp"
#include "semforge/prompts.hpp"
#include "semforge/pseudolabel.hpp"
#include "semforge/repair.hpp"
#include "semforge/textnorm.hpp"

namespace sf = semforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

std::vector<std::string> read_lines(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw sf::IoError("cannot open " + path);
    in = &file;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(*in, line)) lines.push_back(line);
  return lines;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw sf::IoError("cannot open " + path + " for writing");
  return file;
}

void write_json(const std::string& path, const nlohmann::ordered_json& json) {
  std::ofstream file;
  open_output(file, path) << json.dump(2) << '\n';
}

std::set<std::string> parse_slot_list(const std::string& csv) {
  std::set<std::string> slots;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string slot = csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                                    : comma - start);
    if (!slot.empty()) slots.insert(slot);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return slots;
}

struct GenerateArgs {
  std::string kind;
  std::string intent;
  std::string word;
  std::string slots_csv;
  std::string examples_path;
  std::string templates_dir = "data/templates";
  std::string ontology_path = "data/stop_ontology.txt";
  std::string descriptions_path;
  int n = 0;
};

sf::prompts::PromptSpec build_prompt_from_args(const GenerateArgs& args) {
  sf::prompts::TemplateSet templates = sf::prompts::TemplateSet::load(args.templates_dir);
  if (args.kind == "iwp") {
    sf::Ontology ontology = sf::load_ontology(args.ontology_path);
    std::string descriptions_path = args.descriptions_path.empty()
                                        ? args.templates_dir + "/intent_descriptions.txt"
                                        : args.descriptions_path;
    auto descriptions = sf::prompts::load_intent_descriptions(descriptions_path);
    int n = args.n > 0 ? args.n : sf::prompts::kDefaultIwpCount;
    return sf::prompts::build_iwp_prompt(ontology, args.intent, args.word, descriptions, n,
                                         templates);
  }
  if (args.kind == "ep") {
    int n = args.n > 0 ? args.n : sf::prompts::kDefaultEpTranscriptCount;
    return sf::prompts::build_ep_transcript_prompt(read_lines(args.examples_path), n,
                                                   templates);
  }
  if (args.kind == "ep-parse") {
    int n = args.n > 0 ? args.n : sf::prompts::kDefaultEpParseCount;
    std::vector<sf::SeqlogicalParse> examples;
    if (!args.examples_path.empty()) {
      for (const std::string& line : read_lines(args.examples_path)) {
        if (!line.empty()) examples.push_back(sf::parse_seqlogical(line));
      }
    }
    return sf::prompts::build_ep_parse_prompt(args.intent, parse_slot_list(args.slots_csv),
                                              examples, n, templates);
  }
  throw sf::ConfigError("unknown prompt kind '" + args.kind + "' (iwp|ep|ep-parse)");
}

int run(int argc, char** argv) {
  CLI::App app{"semforge: seqlogical parsing, LLM data generation and evaluation toolkit"};
  app.require_subcommand(1);

  // validate ---------------------------------------------------------------
  std::string v_input;
  std::string v_ontology;
  bool v_lenient = false;
  bool v_strict_combos = false;
  auto* validate = app.add_subcommand("validate", "Check a JSONL corpus");
  validate->add_option("--input", v_input)->required();
  validate->add_option("--ontology", v_ontology, "Also check labels against this ontology");
  validate->add_flag("--lenient", v_lenient, "Report invalid lines instead of stopping");
  validate->add_flag("--strict-combinations", v_strict_combos,
                     "Fail on undeclared intent-slot combinations too");
  validate->callback([&] {
    sf::data::ReadResult result = sf::data::read_jsonl(v_input, true);
    for (const auto& issue : result.skipped) {
      std::cerr << v_input << ":" << issue.line << ": " << issue.message << "\n";
    }
    // Label inventories are closed-world; the combination inventory is
    // open for pseudo-labeled data, so unknown combinations only warn
    // unless asked otherwise.
    std::size_t oov = 0;
    std::size_t unknown_combos = 0;
    if (!v_ontology.empty()) {
      sf::Ontology ontology = sf::load_ontology(v_ontology);
      for (const sf::Record& record : result.records) {
        auto report = sf::validate_against_ontology(sf::parse_seqlogical(record.seqlogical),
                                                    ontology);
        if (!report.oov_intents.empty() || !report.oov_slots.empty()) {
          ++oov;
          std::cerr << record.id << ": out of vocabulary:";
          for (const auto& label : report.oov_intents) std::cerr << ' ' << label;
          for (const auto& label : report.oov_slots) std::cerr << ' ' << label;
          std::cerr << "\n";
        } else if (!report.combination_known) {
          ++unknown_combos;
        }
      }
    }
    std::cout << result.records.size() << " valid, " << result.skipped.size()
              << " invalid lines";
    if (!v_ontology.empty()) {
      std::cout << ", " << oov << " out-of-vocabulary records, " << unknown_combos
                << " undeclared combinations";
    }
    std::cout << "\n";
    bool failed = (!result.skipped.empty() && !v_lenient) || oov > 0 ||
                  (v_strict_combos && unknown_combos > 0);
    if (failed) throw sf::RecordError("validation failed");
  });

  // normalize ---------------------------------------------------------------
  std::string n_input = "-";
  std::string n_output = "-";
  bool n_keep_digits = false;
  bool n_strip_apostrophes = false;
  auto* normalize_cmd = app.add_subcommand("normalize", "Spoken-form text normalization");
  normalize_cmd->add_option("--input", n_input, "Text file, one line each; - for stdin");
  normalize_cmd->add_option("--output", n_output);
  normalize_cmd->add_flag("--keep-digits", n_keep_digits, "Do not expand numbers");
  normalize_cmd->add_flag("--strip-apostrophes", n_strip_apostrophes);
  normalize_cmd->callback([&] {
    sf::NormalizationConfig config;
    config.expand_numbers = !n_keep_digits;
    config.keep_apostrophes = !n_strip_apostrophes;
    std::ofstream file;
    std::ostream& out = open_output(file, n_output);
    for (const std::string& line : read_lines(n_input)) {
      out << sf::normalize(line, config) << '\n';
    }
  });

  // stats ---------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->require_subcommand(1);
  std::string s_input;
  std::string s_stopwords = "data/stopwords.txt";
  std::string s_json = "-";
  int s_k = 40;
  auto* intent_words = stats_cmd->add_subcommand("intent-words", "Top words per intent");
  intent_words->add_option("--input", s_input)->required();
  intent_words->add_option("--stopwords", s_stopwords);
  intent_words->add_option("-k,--top-k", s_k);
  intent_words->add_option("--json", s_json, "Write JSON here (- for stdout)");
  intent_words->callback([&] {
    auto records = sf::data::read_jsonl(s_input).records;
    auto stopwords = sf::stats::load_stopwords(s_stopwords);
    auto table = sf::stats::build_intent_word_table(records, stopwords, s_k);
    nlohmann::ordered_json json;
    for (const auto& [intent, words] : table.entries) {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& [word, count] : words) {
        list.push_back({{"word", word}, {"count", count}});
      }
      json[intent] = std::move(list);
    }
    write_json(s_json, json);
  });
  auto* combos = stats_cmd->add_subcommand("combos", "Observed intent-slot combinations");
  combos->add_option("--input", s_input)->required();
  combos->add_option("--json", s_json);
  combos->callback([&] {
    auto records = sf::data::read_jsonl(s_input).records;
    auto table = sf::stats::build_combo_table(records);
    nlohmann::ordered_json json;
    for (const auto& [intent, slot_sets] : table.entries) {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& slots : slot_sets) list.push_back(slots);
      json[intent] = std::move(list);
    }
    write_json(s_json, json);
  });

  // prompt build ---------------------------------------------------------------
  auto* prompt_cmd = app.add_subcommand("prompt", "Prompt construction");
  prompt_cmd->require_subcommand(1);
  GenerateArgs p_args;
  auto* prompt_build = prompt_cmd->add_subcommand("build", "Render a prompt to stdout");
  prompt_build->add_option("--kind", p_args.kind, "iwp|ep|ep-parse")->required();
  prompt_build->add_option("--intent", p_args.intent);
  prompt_build->add_option("--word", p_args.word);
  prompt_build->add_option("--slots", p_args.slots_csv, "Comma-separated slot labels");
  prompt_build->add_option("--examples", p_args.examples_path, "One example per line");
  prompt_build->add_option("--templates", p_args.templates_dir);
  prompt_build->add_option("--ontology", p_args.ontology_path);
  prompt_build->add_option("--descriptions", p_args.descriptions_path);
  prompt_build->add_option("-n", p_args.n);
  prompt_build->callback([&] { std::cout << build_prompt_from_args(p_args).rendered << "\n"; });

  // generate ---------------------------------------------------------------
  GenerateArgs g_args;
  std::string g_backend = "mock";
  std::string g_output = "-";
  std::uint64_t g_seed = 0;
  sf::llm::GatewayConfig g_gateway;
  double g_temperature = 0.8;
  auto* generate = app.add_subcommand("generate", "Build a prompt and query the backend");
  generate->add_option("--kind", g_args.kind)->required();
  generate->add_option("--intent", g_args.intent);
  generate->add_option("--word", g_args.word);
  generate->add_option("--slots", g_args.slots_csv);
  generate->add_option("--examples", g_args.examples_path);
  generate->add_option("--templates", g_args.templates_dir);
  generate->add_option("--ontology", g_args.ontology_path);
  generate->add_option("-n", g_args.n);
  generate->add_option("--backend", g_backend, "mock|remote");
  generate->add_option("--endpoint", g_gateway.endpoint);
  generate->add_option("--model", g_gateway.model);
  generate->add_option("--temperature", g_temperature);
  generate->add_option("--seed", g_seed);
  generate->add_option("--output", g_output, "Cleaned lines, one per line");
  generate->callback([&] {
    sf::prompts::PromptSpec spec = build_prompt_from_args(g_args);
    std::shared_ptr<sf::llm::Backend> backend;
    if (g_backend == "mock") backend = std::make_shared<sf::llm::MockBackend>();
    else if (g_backend == "remote") backend = std::make_shared<sf::llm::RemoteBackend>(g_gateway);
    else throw sf::ConfigError("unknown backend '" + g_backend + "'");
    sf::llm::Gateway gateway(backend, g_gateway);
    sf::llm::GenerationRequest request;
    request.prompt = spec.rendered;
    request.seed = g_seed;
    request.temperature = g_temperature;
    sf::llm::GenerationResponse response = gateway.complete(request);
    sf::prompts::GenerationBatch batch =
        sf::prompts::parse_numbered_response(spec, response.text);
    std::ofstream file;
    std::ostream& out = open_output(file, g_output);
    for (const std::string& line : batch.lines) out << line << '\n';
    for (const auto& rejected : batch.rejected) {
      std::cerr << "rejected (" << rejected.reason << "): " << rejected.text << '\n';
    }
  });

  // repair ---------------------------------------------------------------
  std::string r_input;
  std::string r_intent;
  std::string r_ontology = "data/stop_ontology.txt";
  std::string r_output = "-";
  std::string r_stats;
  std::string r_domain = "weather";
  auto* repair_cmd = app.add_subcommand("repair", "Post-process generated parse lines");
  repair_cmd->add_option("--input", r_input, "One seqlogical line per line")->required();
  repair_cmd->add_option("--intent", r_intent, "Target intent")->required();
  repair_cmd->add_option("--ontology", r_ontology);
  repair_cmd->add_option("--domain", r_domain, "Domain tag for emitted records");
  repair_cmd->add_option("--output", r_output, "Records JSONL");
  repair_cmd->add_option("--stats", r_stats, "Write repair stats JSON here");
  repair_cmd->callback([&] {
    sf::Ontology ontology = sf::load_ontology(r_ontology);
    std::vector<std::string> lines;
    for (std::string& line : read_lines(r_input)) {
      if (!line.empty()) lines.push_back(std::move(line));
    }
    sf::repair::RepairBatchResult result = sf::repair::repair_batch(lines, r_intent, ontology);
    auto records = sf::repair::records_from_outcomes(result.outcomes, "repair-", r_domain);
    std::ofstream file;
    std::ostream& out = open_output(file, r_output);
    for (const sf::Record& record : records) {
      out << sf::data::record_to_json(record).dump() << '\n';
    }
    if (!r_stats.empty()) write_json(r_stats, result.stats.to_json());
    std::cerr << result.stats.to_json().dump() << '\n';
  });

  // pseudo-label ---------------------------------------------------------------
  std::string l_input = "-";
  std::string l_output = "-";
  std::string l_backend = "mock";
  std::string l_fixture = "data/fixtures/rule_labeler.txt";
  std::string l_endpoint;
  auto* label_cmd = app.add_subcommand("pseudo-label", "Parse transcripts with the labeler");
  label_cmd->add_option("--input", l_input, "Normalized transcripts, one per line");
  label_cmd->add_option("--output", l_output, "JSONL of {transcript, seqlogical}");
  label_cmd->add_option("--backend", l_backend, "mock|remote");
  label_cmd->add_option("--labeler", l_fixture, "Rule-mock fixture file");
  label_cmd->add_option("--endpoint", l_endpoint);
  label_cmd->callback([&] {
    std::unique_ptr<sf::label::PseudoLabeler> labeler;
    if (l_backend == "mock") {
      labeler = std::make_unique<sf::label::RuleMockLabeler>(
          sf::label::RuleMockLabeler::from_file(l_fixture));
    } else if (l_backend == "remote") {
      labeler = std::make_unique<sf::label::RemoteLabeler>(l_endpoint);
    } else {
      throw sf::ConfigError("unknown labeler backend '" + l_backend + "'");
    }
    std::ofstream file;
    std::ostream& out = open_output(file, l_output);
    for (const std::string& line : read_lines(l_input)) {
      if (line.empty()) continue;
      try {
        sf::SeqlogicalParse parse = labeler->label(line);
        out << nlohmann::ordered_json{{"transcript", line},
                                      {"seqlogical", sf::serialize(parse)}}
                   .dump()
            << '\n';
      } catch (const sf::label::LabelerError& e) {
        if (e.kind() == sf::label::LabelerError::Kind::kUnavailable) throw;
        std::cerr << "rejected: " << e.what() << '\n';
      }
    }
  });

  // metrics ---------------------------------------------------------------
  std::vector<std::string> m_inputs;
  std::string m_form = "seqlogical";
  std::string m_json;
  auto* metrics_cmd = app.add_subcommand("metrics", "Exact-match evaluation");
  metrics_cmd->add_option("--input", m_inputs, "Eval JSONL; repeat for multiple runs")
      ->required();
  metrics_cmd->add_option("--form", m_form, "seqlogical|decoupled");
  metrics_cmd->add_option("--json", m_json, "Write the report JSON here");
  metrics_cmd->callback([&] {
    bool decoupled = m_form == "decoupled";
    if (!decoupled && m_form != "seqlogical") {
      throw sf::ConfigError("unknown form '" + m_form + "'");
    }
    auto load_items = [](const std::string& path) {
      std::vector<sf::metrics::EvalItem> items;
      int line_no = 0;
      for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
        if (json.is_discarded() || !json.is_object()) {
          throw sf::data::SchemaError(line_no, "invalid eval item");
        }
        sf::metrics::EvalItem item;
        item.reference_parse = json.at("reference_parse").get<std::string>();
        item.hypothesis_parse = json.at("hypothesis_parse").get<std::string>();
        item.reference_transcript = json.value("reference_transcript", "");
        if (json.contains("asr_hypothesis")) {
          item.asr_hypothesis = json.at("asr_hypothesis").get<std::string>();
        }
        items.push_back(std::move(item));
      }
      return items;
    };

    std::vector<sf::metrics::EvalItem> pooled;
    double em_sum = 0.0;
    nlohmann::ordered_json json;
    json["runs"] = nlohmann::ordered_json::array();
    for (const std::string& path : m_inputs) {
      auto items = load_items(path);
      sf::metrics::EmReport report = sf::metrics::em_report(items, decoupled);
      em_sum += report.em;
      pooled.insert(pooled.end(), items.begin(), items.end());
      std::cout << path << ":\n" << sf::metrics::format_report_text(report);
      nlohmann::ordered_json run = report.to_json();
      run["input"] = path;
      json["runs"].push_back(std::move(run));
    }
    if (m_inputs.size() > 1) {
      sf::metrics::EmReport pooled_report = sf::metrics::em_report(pooled, decoupled);
      std::cout << "pooled over " << m_inputs.size() << " runs:\n"
                << sf::metrics::format_report_text(pooled_report);
      std::cout << "mean of run-level EM: "
                << sf::metrics::format_percent(em_sum / m_inputs.size()) << "\n";
      json["pooled"] = pooled_report.to_json();
      json["mean_run_em"] = em_sum / m_inputs.size();
    }
    if (!m_json.empty()) write_json(m_json, json);
  });

  // jat ---------------------------------------------------------------
  auto* jat_cmd = app.add_subcommand("jat", "Mean speech-embedding representations");
  jat_cmd->require_subcommand(1);
  std::string j_corpus;
  std::string j_features_dir;
  std::string j_mean = "mean.json";
  auto* jat_mean = jat_cmd->add_subcommand("mean", "Average paired embeddings");
  jat_mean->add_option("--corpus", j_corpus, "JSONL whose records reference feature files");
  jat_mean->add_option("--features-dir", j_features_dir, "Or: directory of .feat files");
  jat_mean->add_option("--output", j_mean);
  jat_mean->callback([&] {
    std::vector<std::filesystem::path> paths;
    if (!j_corpus.empty()) {
      auto records = sf::data::read_jsonl(j_corpus).records;
      std::filesystem::path base = std::filesystem::path(j_corpus).parent_path();
      for (const sf::Record& record : records) {
        if (record.embedding_ref) paths.push_back(base / *record.embedding_ref);
      }
    } else if (!j_features_dir.empty()) {
      for (const auto& entry : std::filesystem::directory_iterator(j_features_dir)) {
        if (entry.path().extension() == ".feat") paths.push_back(entry.path());
      }
      std::sort(paths.begin(), paths.end());
    } else {
      throw sf::ConfigError("jat mean needs --corpus or --features-dir");
    }
    sf::jat::MeanEmbedding mean = sf::jat::compute_mean_embedding_files(paths);
    sf::jat::write_mean_file(j_mean, mean);
    std::cout << "dim " << mean.dim << ", frames " << mean.n_frames_seen << " -> " << j_mean
              << "\n";
  });
  std::string a_corpus;
  std::string a_mean;
  std::string a_out_dir;
  std::string a_output;
  std::string a_repr = "jat";
  std::string a_tts_dir;
  int a_frames = 4;
  auto* jat_attach = jat_cmd->add_subcommand("attach", "Attach representations to records");
  jat_attach->add_option("--corpus", a_corpus)->required();
  jat_attach->add_option("--mean", a_mean, "Mean JSON from `jat mean` (repr jat)");
  jat_attach->add_option("--out-dir", a_out_dir)->required();
  jat_attach->add_option("--output", a_output, "Updated JSONL (default out-dir/records.jsonl)");
  jat_attach->add_option("--frames-per-token", a_frames);
  jat_attach->add_option("--repr", a_repr, "jat|tts");
  jat_attach->add_option("--features-dir", a_tts_dir, "External features for repr=tts");
  jat_attach->callback([&] {
    auto records = sf::data::read_jsonl(a_corpus).records;
    std::filesystem::path out_dir = a_out_dir;
    std::vector<sf::Record> updated;
    if (a_repr == "jat") {
      if (a_mean.empty()) throw sf::ConfigError("repr=jat needs --mean");
      sf::jat::MeanEmbedding mean = sf::jat::read_mean_file(a_mean);
      sf::jat::AttachResult result =
          sf::jat::attach_representations(records, mean, a_frames, out_dir);
      std::cerr << "attached " << result.written << ", skipped " << result.skipped << "\n";
      updated = std::move(result.records);
    } else if (a_repr == "tts") {
      if (a_tts_dir.empty()) throw sf::ConfigError("repr=tts needs --features-dir");
      std::filesystem::create_directories(out_dir / "feat");
      std::size_t attached = 0;
      std::size_t missing = 0;
      for (sf::Record record : records) {
        std::filesystem::path source =
            std::filesystem::path(a_tts_dir) / (record.id + ".feat");
        if (std::filesystem::exists(source)) {
          sf::jat::EmbeddingMatrix matrix = sf::jat::read_feature_file(source);
          std::string relative = "feat/" + record.id + ".feat";
          sf::jat::write_feature_file(out_dir / relative, matrix);
          record.embedding_ref = relative;
          record.repr = "tts";
          ++attached;
        } else {
          ++missing;
        }
        updated.push_back(std::move(record));
      }
      std::cerr << "attached " << attached << ", missing " << missing << "\n";
    } else {
      throw sf::ConfigError("unknown repr '" + a_repr + "'");
    }
    std::filesystem::path output =
        a_output.empty() ? out_dir / "records.jsonl" : std::filesystem::path(a_output);
    sf::data::write_jsonl(updated, output);
  });

  // split ---------------------------------------------------------------
  std::string sp_input;
  std::string sp_policy;
  std::string sp_output = "-";
  std::uint64_t sp_seed = 0;
  int sp_k = 3;
  auto* split_cmd = app.add_subcommand("split", "Dataset splits");
  split_cmd->add_option("--input", sp_input)->required();
  split_cmd->add_option("--policy", sp_policy, "ed|nd|weather")->required();
  split_cmd->add_option("--seed", sp_seed);
  split_cmd->add_option("--k-examples", sp_k);
  split_cmd->add_option("--output", sp_output, "Manifest JSON");
  split_cmd->callback([&] {
    auto records = sf::data::read_jsonl(sp_input).records;
    if (sp_policy == "ed") {
      write_json(sp_output, sf::data::split_ed(records, sp_seed).to_json());
    } else if (sp_policy == "nd") {
      sf::data::SplitManifest manifest = sf::data::split_nd(records);
      nlohmann::ordered_json json = manifest.to_json();
      double a = static_cast<double>(manifest.part_a.size());
      double b = static_cast<double>(manifest.part_b.size());
      json["ratio"] = b == 0 ? 0.0 : a / b;
      std::cerr << "totals " << a << " / " << b << " (ratio " << (b == 0 ? 0.0 : a / b)
                << ")\n";
      write_json(sp_output, json);
    } else if (sp_policy == "weather") {
      write_json(sp_output, sf::data::weather_holdout(records, sp_k, sp_seed).to_json());
    } else {
      throw sf::ConfigError("unknown policy '" + sp_policy + "' (ed|nd|weather)");
    }
  });

  // pipeline ---------------------------------------------------------------
  auto* pipeline_cmd = app.add_subcommand("pipeline", "End-to-end data generation");
  pipeline_cmd->require_subcommand(1);
  std::string pl_config;
  std::string pl_out;
  std::vector<std::string> pl_sets;
  std::string pl_backend;
  std::optional<std::uint64_t> pl_seed;
  bool pl_dry_run = false;
  bool pl_log = false;
  auto add_pipeline_args = [&](CLI::App* cmd) {
    cmd->add_option("--config", pl_config, "Flat key = value file")->required();
    cmd->add_option("--out", pl_out, "Output directory (overrides config)");
    cmd->add_option("--set", pl_sets, "Extra key=value overrides");
    cmd->add_option("--backend", pl_backend, "mock|remote");
    cmd->add_option("--seed", pl_seed);
    cmd->add_flag("--dry-run", pl_dry_run, "Emit the plan and stop");
    cmd->add_flag("--log", pl_log, "Structured JSONL logs on stderr");
  };
  auto run_pipeline = [&](const std::string& mode) {
    sf::pipeline::PipelineConfig config = sf::pipeline::load_config(pl_config);
    config.mode = mode;
    if (!pl_out.empty()) config.out_dir = pl_out;
    if (!pl_backend.empty()) config.backend = pl_backend;
    if (pl_seed) config.seed = *pl_seed;
    if (pl_dry_run) config.dry_run = true;
    for (const std::string& kv : pl_sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw sf::ConfigError("--set expects key=value");
      sf::pipeline::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (config.out_dir.empty()) throw sf::ConfigError("no output directory configured");
    sf::JsonlLogger logger(pl_log ? &std::cerr : nullptr);
    sf::pipeline::PipelineReport report =
        mode == "ed" ? sf::pipeline::run_ed_pipeline(config, pl_log ? &logger : nullptr)
                     : sf::pipeline::run_nd_pipeline(config, pl_log ? &logger : nullptr);
    std::cout << report.json.dump(2) << "\n";
  };
  auto* pipeline_ed = pipeline_cmd->add_subcommand("ed", "Existing-domain augmentation");
  add_pipeline_args(pipeline_ed);
  pipeline_ed->callback([&] { run_pipeline("ed"); });
  auto* pipeline_nd = pipeline_cmd->add_subcommand("nd", "New-domain augmentation");
  add_pipeline_args(pipeline_nd);
  pipeline_nd->callback([&] { run_pipeline("nd"); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sf::pipeline::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const sf::llm::GatewayError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const sf::label::LabelerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == sf::label::LabelerError::Kind::kUnavailable ? kExitBackend
                                                                   : kExitValidation;
  } catch (const sf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sf::OntologyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sf::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
