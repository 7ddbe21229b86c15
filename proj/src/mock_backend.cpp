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

#include <algorithm>
#include <array>
#include <optional>

#include "semforge/gateway.hpp"
#include "semforge/rng.hpp"

namespace semforge::llm {

namespace {

using prompts::PromptKind;

constexpr std::array<const char*, 7> kAskPrefixes = {
    "can you tell me", "please check", "what is",      "show me",
    "i want to know",  "do you know",  "give me"};

constexpr std::array<const char*, 10> kPlaces = {
    "boston", "paris",   "london", "madrid", "chicago",
    "seattle", "austin", "denver", "tokyo",  "oslo"};

constexpr std::array<const char*, 8> kNames = {
    "alex",  "jordan", "sam",   "taylor",
    "maria", "chris",  "jamie", "morgan"};

constexpr std::array<const char*, 6> kDates = {
    "tomorrow", "tonight", "today", "monday", "next week", "this evening"};

constexpr std::array<const char*, 6> kWeatherWords = {
    "rain", "snow", "wind", "fog", "sunshine", "humidity"};

constexpr std::array<const char*, 2> kTempUnits = {"fahrenheit", "celsius"};

constexpr std::array<const char*, 4> kGenericSlotWords = {"alpha", "beta", "gamma", "delta"};

constexpr std::array<const char*, 7> kParseStarters = {
    "what is the", "will it be", "how is the", "tell me the",
    "is it",       "give me the", "check the"};

constexpr std::array<const char*, 6> kParseTopics = {
    "weather", "update", "report", "details", "status", "forecast"};

constexpr std::array<const char*, 5> kConnectors = {"in", "for", "at", "near", "around"};

constexpr std::array<const char*, 5> kEchoPrefixes = {
    "", "could you tell me ", "i was wondering ", "hey ", "please tell me "};

constexpr std::array<const char*, 4> kEchoSuffixes = {"", " please", " right now",
                                                      " when you can"};

constexpr std::array<const char*, 8> kOffTopic = {
    "play some jazz music for me",
    "set an alarm for monday morning",
    "send a message to alex now",
    "remind me to call maria tomorrow",
    "pause the kitchen timer please",
    "give me directions to the office",
    "what events are happening downtown this weekend",
    "skip this track and play the next one"};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& pool, Lcg64& rng) {
  return pool[rng.bounded(N)];
}

std::string slot_words(const std::string& slot, Lcg64& rng) {
  if (slot == "SL:LOCATION" || slot == "SL:DESTINATION" || slot == "SL:SOURCE_LOCATION") {
    std::string out = pick(kPlaces, rng);
    if (rng.bounded(4) == 0) out += std::string(" ") + pick(kPlaces, rng);
    return out;
  }
  if (slot == "SL:DATE_TIME" || slot == "SL:ARRIVAL_TIME" || slot == "SL:DEPARTURE_TIME") {
    return pick(kDates, rng);
  }
  if (slot == "SL:WEATHER_ATTRIBUTE") return pick(kWeatherWords, rng);
  if (slot == "SL:WEATHER_TEMPERATURE_UNIT") return pick(kTempUnits, rng);
  return pick(kGenericSlotWords, rng);
}

// One well-formed seqlogical line with exactly the requested intent and
// slots, canonical spacing.
std::string good_parse_line(const std::string& intent, const std::vector<std::string>& slots,
                            Lcg64& rng) {
  std::string line = "[" + intent + " ";
  line += pick(kParseStarters, rng);
  line += ' ';
  line += pick(kParseTopics, rng);
  for (const std::string& slot : slots) {
    line += ' ';
    line += pick(kConnectors, rng);
    line += " [" + slot + " " + slot_words(slot, rng) + " ]";
  }
  line += " ]";
  return line;
}

// Deliberately broken variants, cycling by position so frozen counts hold
// for any seed. SL:PLACE and the _XX labels are outside the bundled
// ontology; SL:ORDINAL is in it but never combined with weather intents.
enum class BadKind { kMalformed, kOovRoot, kOovSlot, kBadCombo, kNestedOovIntent };

std::string bad_parse_line(BadKind kind, const std::string& intent,
                           const std::vector<std::string>& slots, Lcg64& rng) {
  switch (kind) {
    case BadKind::kMalformed: {
      std::string line = good_parse_line(intent, slots, rng);
      line.pop_back();  // drop the closing bracket
      return line;
    }
    case BadKind::kOovRoot:
      return good_parse_line(intent + "_XX", slots, rng);
    case BadKind::kOovSlot: {
      std::string line = good_parse_line(intent, slots, rng);
      std::string extra = std::string("[SL:PLACE ") + pick(kPlaces, rng) + " ] ";
      line.insert(line.size() - 1, extra);
      return line;
    }
    case BadKind::kBadCombo: {
      std::string line = good_parse_line(intent, slots, rng);
      line.insert(line.size() - 1, "[SL:ORDINAL first ] ");
      return line;
    }
    case BadKind::kNestedOovIntent: {
      std::string line = good_parse_line(intent, slots, rng);
      line.insert(line.size() - 1, "[IN:CHECK_XX please ] ");
      return line;
    }
  }
  return {};
}

std::string iwp_line(const std::string& word, Lcg64& rng) {
  std::string line = pick(kAskPrefixes, rng);
  line += rng.bounded(2) ? " the " : " ";
  line += word;
  switch (rng.bounded(6)) {
    case 0: line += std::string(" in ") + pick(kPlaces, rng); break;
    case 1: line += std::string(" for ") + pick(kNames, rng); break;
    case 2: line += " right now"; break;
    case 3: line += " today"; break;
    case 4: line += std::string(" near ") + pick(kPlaces, rng); break;
    default: break;
  }
  return line;
}

std::string ep_transcript_line(const std::vector<std::string>& examples, std::size_t index,
                               Lcg64& rng) {
  // Two lines in five drift off topic, mirroring exemplar prompting's
  // lower intent fidelity; the rest echo a provided example. Drift lines
  // get a name and place salt so they stay distinct across prompts.
  if (index % 5 == 2 || index % 5 == 4 || examples.empty()) {
    std::string line = pick(kOffTopic, rng);
    line += std::string(" for ") + pick(kNames, rng);
    line += std::string(" near ") + pick(kPlaces, rng);
    return line;
  }
  const std::string& base = examples[rng.bounded(examples.size())];
  std::string line = pick(kEchoPrefixes, rng);
  line += base;
  line += pick(kEchoSuffixes, rng);
  return line;
}

int default_count(PromptKind kind) {
  switch (kind) {
    case PromptKind::kIwp: return prompts::kDefaultIwpCount;
    case PromptKind::kEpTranscript: return prompts::kDefaultEpTranscriptCount;
    case PromptKind::kEpParse: return prompts::kDefaultEpParseCount;
    case PromptKind::kReprompt: return 1;
  }
  return 1;
}

}  // namespace

std::string mock_generate(const MockParams& params, std::uint64_t seed) {
  Lcg64 rng(seed);
  const int n = params.n > 0 ? params.n : default_count(params.kind);

  switch (params.kind) {
    case PromptKind::kIwp: {
      std::string out;
      for (int i = 0; i < n; ++i) {
        out += std::to_string(i + 1) + ". " + iwp_line(params.intent_word, rng) + "\n";
      }
      return out;
    }
    case PromptKind::kEpTranscript: {
      std::string out;
      for (int i = 0; i < n; ++i) {
        out += std::to_string(i + 1) + ". " +
               ep_transcript_line(params.examples, static_cast<std::size_t>(i), rng) + "\n";
      }
      return out;
    }
    case PromptKind::kEpParse: {
      std::string out;
      int bad_counter = 0;
      for (int i = 0; i < n; ++i) {
        std::string line;
        if (i % 10 == 9) {
          BadKind kind = static_cast<BadKind>(bad_counter++ % 5);
          line = bad_parse_line(kind, params.intent, params.slots, rng);
        } else {
          line = good_parse_line(params.intent, params.slots, rng);
        }
        out += std::to_string(i + 1) + ". " + line + "\n";
      }
      return out;
    }
    case PromptKind::kReprompt:
      return good_parse_line(params.intent, params.slots, rng) + "\n";
  }
  throw GatewayError(GatewayErrorKind::kBackendRefusal, "no mock grammar for prompt kind");
}

namespace {

std::optional<std::string> capture(const std::string& text, std::string_view before,
                                   std::string_view until) {
  std::size_t start = text.find(before);
  if (start == std::string::npos) return std::nullopt;
  start += before.size();
  std::size_t end = text.find(until, start);
  if (end == std::string::npos) return std::nullopt;
  return text.substr(start, end - start);
}

std::optional<int> capture_int(const std::string& text, std::string_view before) {
  std::size_t start = text.find(before);
  if (start == std::string::npos) return std::nullopt;
  start += before.size();
  int value = 0;
  bool any = false;
  while (start < text.size() && std::isdigit(static_cast<unsigned char>(text[start]))) {
    value = value * 10 + (text[start] - '0');
    ++start;
    any = true;
  }
  if (!any) return std::nullopt;
  return value;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t comma = csv.find(", ", start);
    if (comma == std::string::npos) {
      out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, comma - start));
    start = comma + 2;
  }
  return out;
}

// Numbered example lines embedded in a prompt ("1. ...").
std::vector<std::string> numbered_lines(const std::string& prompt) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= prompt.size()) {
    std::size_t end = prompt.find('\n', start);
    std::string line = end == std::string::npos ? prompt.substr(start)
                                                : prompt.substr(start, end - start);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i + 1 < line.size() && line[i] == '.' && line[i + 1] == ' ') {
      out.push_back(line.substr(i + 2));
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::optional<MockParams> sniff_prompt(const std::string& prompt) {
  MockParams params;
  if (prompt.find("Reply with exactly one corrected line") != std::string::npos) {
    params.kind = PromptKind::kReprompt;
    if (auto intent = capture(prompt, "uses the intent ", " and")) params.intent = *intent;
    if (auto slots = capture(prompt, "only slots from this list: ", ". Keep")) {
      if (*slots != "no slots") params.slots = split_list(*slots);
    }
    if (auto line = capture(prompt, "\n\n", "\n\n")) params.offending_line = *line;
    params.n = 1;
    return params;
  }
  if (prompt.find("Each sentence should be enclosed in square brackets") != std::string::npos) {
    params.kind = PromptKind::kEpParse;
    auto intent = capture(prompt, "with the intent ", " and ");
    if (!intent) return std::nullopt;
    params.intent = *intent;
    if (auto slots = capture(prompt, "any of the slots ", ". The sentences")) {
      params.slots = split_list(*slots);
    }
    if (auto n = capture_int(prompt, "Write ")) params.n = *n;
    return params;
  }
  if (prompt.find("similar in intent to the following sentences") != std::string::npos) {
    params.kind = PromptKind::kEpTranscript;
    if (auto n = capture_int(prompt, "Generate ")) params.n = *n;
    params.examples = numbered_lines(prompt);
    return params;
  }
  if (prompt.find("that are classified under this intent") != std::string::npos) {
    params.kind = PromptKind::kIwp;
    if (auto word = capture(prompt, "use the word \"", "\"")) params.intent_word = *word;
    if (auto intent = capture(prompt, "Given the intents ", ",")) params.intent = *intent;
    if (auto n = capture_int(prompt, ", generate ")) params.n = *n;
    return params;
  }
  return std::nullopt;
}

}  // namespace

GenerationResponse MockBackend::generate(const GenerationRequest& request) {
  auto params = sniff_prompt(request.prompt);
  if (!params) {
    throw GatewayError(GatewayErrorKind::kBackendRefusal,
                       "mock backend does not recognize the prompt");
  }
  GenerationResponse response;
  response.backend_id = id();
  std::uint64_t seed = request.seed ^ fnv1a64(request.prompt);
  std::string body = mock_generate(*params, seed);
  if (params->kind == PromptKind::kEpTranscript) {
    response.text = "Sure! Here are some sentences:\n" + body;
  } else {
    response.text = body;
  }
  response.empty_warning = response.text.empty();
  return response;
}

}  // namespace semforge::llm
