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

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/ontology.hpp"
#include "semforge/parse.hpp"

namespace semforge::prompts {

enum class PromptKind { kIwp, kEpTranscript, kEpParse, kReprompt };

std::string_view to_string(PromptKind kind);

// Default request sizes of the three prompt families.
inline constexpr int kDefaultIwpCount = 40;
inline constexpr int kDefaultEpTranscriptCount = 60;
inline constexpr int kDefaultEpParseCount = 30;

inline constexpr int kMaxEpTranscriptExamples = 4;
inline constexpr int kMaxEpParseExamples = 3;

class PromptError : public Error {
 public:
  enum class Kind {
    kUnknownIntent,
    kNoExamples,
    kTooManyExamples,
    kIntentMismatch,
    kWrongStatus,
    kBadTemplate,
    kBadArgument,
  };

  PromptError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Prompt templates are text fixtures with {{placeholder}} markers, one
// file per prompt kind. A trailing newline in the file is not part of the
// template.
struct TemplateSet {
  std::string iwp;
  std::string ep_transcript;
  std::string ep_parse;
  std::string reprompt;

  static TemplateSet load(const std::filesystem::path& dir);
};

struct IntentDescription {
  std::string intent;
  std::string description;
};

// Tab-separated label / description lines; '#' comments ignored.
std::vector<IntentDescription> load_intent_descriptions(const std::filesystem::path& path);

// A built prompt plus everything needed to interpret its response.
struct PromptSpec {
  PromptKind kind = PromptKind::kIwp;
  std::string target_intent;          // IWP, EP_PARSE, reprompt
  std::string intent_word;            // IWP only
  std::set<std::string> slots;        // EP_PARSE, reprompt
  std::vector<std::string> examples;  // EP_*: transcripts or serialized parses
  int n_requested = 0;
  std::string rendered;
};

// Substitutes {{key}} markers; throws PromptError(kBadTemplate) when a
// marker has no value.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

// "40 utterances" / "1 utterance".
std::string counted_noun(int n, std::string_view noun);

PromptSpec build_iwp_prompt(const Ontology& ontology, const std::string& intent,
                            const std::string& intent_word,
                            const std::vector<IntentDescription>& descriptions,
                            int n, const TemplateSet& templates);

PromptSpec build_ep_transcript_prompt(const std::vector<std::string>& examples, int n,
                                      const TemplateSet& templates);

PromptSpec build_ep_parse_prompt(const std::string& intent,
                                 const std::set<std::string>& slots,
                                 const std::vector<SeqlogicalParse>& examples, int n,
                                 const TemplateSet& templates);

struct RejectedLine {
  std::string text;
  std::string reason;  // "no_alpha" | "no-numbering-preamble"
};

struct GenerationBatch {
  PromptSpec spec;
  std::string raw_response;
  std::vector<std::string> lines;
  std::vector<RejectedLine> rejected;
};

// Strips leading enumeration ("12.", "12)", "12 -"), trims whitespace,
// drops blank lines, and rejects commentary (lines with no alphabetic
// content, and unnumbered "here are"-style preambles). Total.
GenerationBatch parse_numbered_response(PromptSpec spec, std::string_view raw);

}  // namespace semforge::prompts
