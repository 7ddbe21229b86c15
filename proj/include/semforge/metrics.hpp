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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "semforge/errors.hpp"

namespace semforge::metrics {

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

struct EvalItem {
  std::string reference_parse;   // must parse
  std::string hypothesis_parse;  // may be arbitrary text
  std::string reference_transcript;
  std::optional<std::string> asr_hypothesis;
};

// True iff hyp parses and the canonical serializations are byte-equal.
// Whitespace artifacts therefore never count as parse errors. The
// reference must parse; ParseError propagates if it does not.
bool exact_match(std::string_view hyp, std::string_view ref);

// Same, over the decoupled form of both sides.
bool exact_match_decoupled(std::string_view hyp, std::string_view ref);

// True iff the two strings differ after normalization (number expansion
// on). Inputs are expected to be spoken-form transcripts already;
// normalization here makes the check robust to formatting drift.
bool asr_error_flag(std::string_view reference_transcript, std::string_view asr_hypothesis);

struct EmReport {
  double em = 0.0;
  std::optional<double> em_no_err;  // absent when no error-free items
  std::optional<double> em_w_err;   // absent when no errorful items
  std::uint64_t total = 0;
  std::uint64_t n_no_err = 0;
  std::uint64_t n_w_err = 0;
  std::uint64_t correct_total = 0;
  std::uint64_t correct_no_err = 0;
  std::uint64_t correct_w_err = 0;

  nlohmann::ordered_json to_json() const;
};

// Overall EM over all items plus EMs stratified by the ASR-error flag.
// Items without an ASR hypothesis count only toward the overall number.
// Parallelized; integer tallies make the result schedule-independent.
EmReport em_report(std::span<const EvalItem> items, bool decoupled_form = false);

EmReport em_report_serial(std::span<const EvalItem> items, bool decoupled_form = false);

// "64.25" style: fraction as a percentage, two decimals, half-up.
std::string format_percent(double fraction);

// Aligned-column text table of the report.
std::string format_report_text(const EmReport& report);

}  // namespace semforge::metrics
