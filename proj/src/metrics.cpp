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

#include "semforge/metrics.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "semforge/parse.hpp"
#include "semforge/textnorm.hpp"

namespace semforge::metrics {

namespace {

bool match_impl(std::string_view hyp, std::string_view ref, bool decoupled) {
  SeqlogicalParse ref_parse = parse_seqlogical(ref);
  auto hyp_parse = try_parse_seqlogical(hyp);
  if (!hyp_parse) return false;
  if (decoupled) return to_decoupled(*hyp_parse) == to_decoupled(ref_parse);
  return serialize(*hyp_parse) == serialize(ref_parse);
}

struct Tally {
  std::uint64_t n_no_err = 0, n_w_err = 0;
  std::uint64_t correct_total = 0, correct_no_err = 0, correct_w_err = 0;
};

void tally_item(const EvalItem& item, bool decoupled, Tally& t) {
  bool correct = match_impl(item.hypothesis_parse, item.reference_parse, decoupled);
  if (correct) ++t.correct_total;
  if (item.asr_hypothesis) {
    bool err = asr_error_flag(item.reference_transcript, *item.asr_hypothesis);
    if (err) {
      ++t.n_w_err;
      if (correct) ++t.correct_w_err;
    } else {
      ++t.n_no_err;
      if (correct) ++t.correct_no_err;
    }
  }
}

EmReport report_from_tally(const Tally& t, std::uint64_t total) {
  EmReport report;
  report.total = total;
  report.n_no_err = t.n_no_err;
  report.n_w_err = t.n_w_err;
  report.correct_total = t.correct_total;
  report.correct_no_err = t.correct_no_err;
  report.correct_w_err = t.correct_w_err;
  report.em = static_cast<double>(t.correct_total) / static_cast<double>(total);
  if (t.n_no_err > 0) {
    report.em_no_err =
        static_cast<double>(t.correct_no_err) / static_cast<double>(t.n_no_err);
  }
  if (t.n_w_err > 0) {
    report.em_w_err = static_cast<double>(t.correct_w_err) / static_cast<double>(t.n_w_err);
  }
  return report;
}

}  // namespace

bool exact_match(std::string_view hyp, std::string_view ref) {
  return match_impl(hyp, ref, false);
}

bool exact_match_decoupled(std::string_view hyp, std::string_view ref) {
  return match_impl(hyp, ref, true);
}

bool asr_error_flag(std::string_view reference_transcript, std::string_view asr_hypothesis) {
  NormalizationConfig config;
  config.expand_numbers = true;
  return normalize(reference_transcript, config) != normalize(asr_hypothesis, config);
}

EmReport em_report_serial(std::span<const EvalItem> items, bool decoupled_form) {
  if (items.empty()) throw EmptyInputError("em_report over empty input");
  Tally tally;
  for (const EvalItem& item : items) tally_item(item, decoupled_form, tally);
  return report_from_tally(tally, items.size());
}

EmReport em_report(std::span<const EvalItem> items, bool decoupled_form) {
  if (items.empty()) throw EmptyInputError("em_report over empty input");
  int max_threads = omp_get_max_threads();
  std::vector<Tally> partials(max_threads);

#pragma omp parallel
  {
    Tally& mine = partials[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
      tally_item(items[i], decoupled_form, mine);
    }
  }

  Tally tally;
  for (const Tally& partial : partials) {
    tally.n_no_err += partial.n_no_err;
    tally.n_w_err += partial.n_w_err;
    tally.correct_total += partial.correct_total;
    tally.correct_no_err += partial.correct_no_err;
    tally.correct_w_err += partial.correct_w_err;
  }
  return report_from_tally(tally, items.size());
}

std::string format_percent(double fraction) {
  // Half-up at two decimals on the percentage value.
  double percent = fraction * 100.0;
  double rounded = std::floor(percent * 100.0 + 0.5) / 100.0;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", rounded);
  return buffer;
}

std::string format_report_text(const EmReport& report) {
  std::ostringstream out;
  auto row = [&](const char* name, std::optional<double> value, std::uint64_t correct,
                 std::uint64_t n) {
    char line[128];
    if (value) {
      std::snprintf(line, sizeof(line), "%-12s %8s  (%llu/%llu)\n", name,
                    format_percent(*value).c_str(),
                    static_cast<unsigned long long>(correct),
                    static_cast<unsigned long long>(n));
    } else {
      std::snprintf(line, sizeof(line), "%-12s %8s\n", name, "-");
    }
    out << line;
  };
  row("EM", report.em, report.correct_total, report.total);
  row("EM (No Err)", report.em_no_err, report.correct_no_err, report.n_no_err);
  row("EM w/ Err", report.em_w_err, report.correct_w_err, report.n_w_err);
  return out.str();
}

nlohmann::ordered_json EmReport::to_json() const {
  nlohmann::ordered_json json{
      {"em", em},
      {"counts",
       {{"total", total},
        {"no_err", n_no_err},
        {"w_err", n_w_err},
        {"correct_total", correct_total},
        {"correct_no_err", correct_no_err},
        {"correct_w_err", correct_w_err}}},
  };
  if (em_no_err) json["em_no_err"] = *em_no_err;
  if (em_w_err) json["em_w_err"] = *em_w_err;
  return json;
}

}  // namespace semforge::metrics
