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

#include "semforge/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace semforge::prompts {

namespace {

std::string load_template_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::string numbered_block(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "\n\n";
    out += std::to_string(i + 1);
    out += ". ";
    out += items[i];
  }
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

bool has_alpha(std::string_view s) {
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "Sure! Here are..." style openers and headers ending in ':'.
bool looks_like_preamble(std::string_view line) {
  if (!line.empty() && line.back() == ':') return true;
  std::string lowered;
  for (char c : line) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const char* kOpeners[] = {"sure", "okay", "ok,", "certainly", "of course",
                                   "here are", "here is", "great", "absolutely"};
  for (const char* opener : kOpeners) {
    if (lowered.rfind(opener, 0) == 0) return true;
  }
  return lowered.find("here are") != std::string::npos;
}

// Strips one leading "<digits><separator>" enumeration; returns whether
// anything was stripped.
bool strip_enumeration(std::string_view& line) {
  std::string_view s = line;
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i > 5) return false;
  std::size_t j = i;
  while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
  bool separator = false;
  if (j < s.size() && (s[j] == '.' || s[j] == ')' || s[j] == ']' || s[j] == ':' || s[j] == '-')) {
    ++j;
    separator = true;
  }
  if (!separator) return false;
  while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
  line = s.substr(j);
  return true;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kIwp: return "iwp";
    case PromptKind::kEpTranscript: return "ep_transcript";
    case PromptKind::kEpParse: return "ep_parse";
    case PromptKind::kReprompt: return "reprompt";
  }
  return "unknown";
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  set.iwp = load_template_file(dir / "iwp.txt");
  set.ep_transcript = load_template_file(dir / "ep_transcript.txt");
  set.ep_parse = load_template_file(dir / "ep_parse.txt");
  set.reprompt = load_template_file(dir / "reprompt.txt");
  return set;
}

std::vector<IntentDescription> load_intent_descriptions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open intent description file " + path.string());
  std::vector<IntentDescription> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("intent description line lacks a tab: " + line);
    }
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    std::size_t close = tmpl.find("}}", open);
    if (close == std::string_view::npos) {
      throw PromptError(PromptError::Kind::kBadTemplate, "unterminated placeholder");
    }
    std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) {
      throw PromptError(PromptError::Kind::kBadTemplate, "no value for placeholder " + key);
    }
    out += it->second;
    pos = close + 2;
  }
  return out;
}

std::string counted_noun(int n, std::string_view noun) {
  std::string out = std::to_string(n);
  out += ' ';
  out += noun;
  if (n != 1) out += 's';
  return out;
}

PromptSpec build_iwp_prompt(const Ontology& ontology, const std::string& intent,
                            const std::string& intent_word,
                            const std::vector<IntentDescription>& descriptions,
                            int n, const TemplateSet& templates) {
  if (!ontology.has_intent(intent)) {
    throw PromptError(PromptError::Kind::kUnknownIntent, "unknown intent " + intent);
  }
  auto domain = ontology.domain_of(intent);
  if (!domain) {
    throw PromptError(PromptError::Kind::kUnknownIntent,
                      intent + " is not assigned to any domain");
  }
  if (intent_word.empty()) {
    throw PromptError(PromptError::Kind::kBadArgument, "intent word is empty");
  }
  if (n < 1) throw PromptError(PromptError::Kind::kBadArgument, "n must be positive");

  std::vector<std::string> description_lines;
  for (const IntentDescription& d : descriptions) {
    description_lines.push_back(d.intent + " - " + d.description);
  }

  PromptSpec spec;
  spec.kind = PromptKind::kIwp;
  spec.target_intent = intent;
  spec.intent_word = intent_word;
  spec.n_requested = n;
  spec.rendered = render_template(
      templates.iwp, {
                         {"descriptions", numbered_block(description_lines)},
                         {"domain", *domain},
                         {"intent", intent},
                         {"word", intent_word},
                         {"n_utterances", counted_noun(n, "utterance")},
                     });
  return spec;
}

PromptSpec build_ep_transcript_prompt(const std::vector<std::string>& examples, int n,
                                      const TemplateSet& templates) {
  if (examples.empty()) {
    throw PromptError(PromptError::Kind::kNoExamples, "exemplar prompt needs at least one example");
  }
  if (examples.size() > kMaxEpTranscriptExamples) {
    throw PromptError(PromptError::Kind::kTooManyExamples,
                      "exemplar prompt takes at most " +
                          std::to_string(kMaxEpTranscriptExamples) + " examples");
  }
  if (n < 1) throw PromptError(PromptError::Kind::kBadArgument, "n must be positive");

  PromptSpec spec;
  spec.kind = PromptKind::kEpTranscript;
  spec.examples = examples;
  spec.n_requested = n;
  spec.rendered = render_template(templates.ep_transcript,
                                  {
                                      {"n", std::to_string(n)},
                                      {"sentence_noun", n == 1 ? "sentence" : "sentences"},
                                      {"examples", numbered_block(examples)},
                                  });
  return spec;
}

PromptSpec build_ep_parse_prompt(const std::string& intent,
                                 const std::set<std::string>& slots,
                                 const std::vector<SeqlogicalParse>& examples, int n,
                                 const TemplateSet& templates) {
  if (examples.size() > kMaxEpParseExamples) {
    throw PromptError(PromptError::Kind::kTooManyExamples,
                      "parse prompt takes at most " + std::to_string(kMaxEpParseExamples) +
                          " examples");
  }
  if (n < 1) throw PromptError(PromptError::Kind::kBadArgument, "n must be positive");

  std::vector<std::string> example_lines;
  for (const SeqlogicalParse& example : examples) {
    if (top_intent(example) != intent) {
      throw PromptError(PromptError::Kind::kIntentMismatch,
                        "example with top intent " + top_intent(example) +
                            " does not match " + intent);
    }
    example_lines.push_back(serialize(example));
  }

  std::vector<std::string> sorted_slots(slots.begin(), slots.end());
  std::string slots_phrase =
      slots.empty() ? "no slots" : "any of the slots " + join(sorted_slots, ", ");

  std::string skeleton = "[" + intent;
  for (const std::string& slot : sorted_slots) skeleton += " [" + slot + "]";
  skeleton += " ]";

  std::string examples_block;
  if (!example_lines.empty()) {
    examples_block = " Here are some examples:\n\n" + numbered_block(example_lines);
  }

  PromptSpec spec;
  spec.kind = PromptKind::kEpParse;
  spec.target_intent = intent;
  spec.slots = slots;
  spec.examples = example_lines;
  spec.n_requested = n;
  spec.rendered = render_template(templates.ep_parse,
                                  {
                                      {"examples_block", examples_block},
                                      {"intent", intent},
                                      {"slots_phrase", slots_phrase},
                                      {"skeleton", skeleton},
                                      {"n", std::to_string(n)},
                                      {"sentence_noun", n == 1 ? "sentence" : "sentences"},
                                  });
  return spec;
}

GenerationBatch parse_numbered_response(PromptSpec spec, std::string_view raw) {
  GenerationBatch batch;
  batch.spec = std::move(spec);
  batch.raw_response = std::string(raw);

  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    std::string_view line = end == std::string_view::npos
                                ? raw.substr(start)
                                : raw.substr(start, end - start);
    start = end == std::string_view::npos ? raw.size() + 1 : end + 1;

    std::string_view content = trim(line);
    if (content.empty()) continue;

    bool numbered = false;
    while (strip_enumeration(content)) numbered = true;
    content = trim(content);

    if (!has_alpha(content)) {
      batch.rejected.push_back({std::string(trim(line)), "no_alpha"});
      continue;
    }
    if (!numbered && looks_like_preamble(content)) {
      batch.rejected.push_back({std::string(trim(line)), "no-numbering-preamble"});
      continue;
    }
    batch.lines.emplace_back(content);
  }
  return batch;
}

}  // namespace semforge::prompts
