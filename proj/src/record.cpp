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

#include "semforge/record.hpp"

#include "semforge/parse.hpp"

namespace semforge {

bool is_valid_source_tag(const std::string& tag) {
  return tag == kSourceStop || tag == kSourceLlmIwp || tag == kSourceLlmEp ||
         tag == kSourceLlmEpParse || tag == kSourceSeedExample;
}

bool is_valid_repr_tag(const std::string& tag) {
  return tag == "jat" || tag == "tts" || tag == "real";
}

void validate_record(const Record& record) {
  if (record.id.empty()) throw RecordError("record has empty id");
  if (record.domain.empty()) throw RecordError("record " + record.id + " has empty domain");
  if (!is_valid_source_tag(record.source)) {
    throw RecordError("record " + record.id + " has unknown source tag '" + record.source + "'");
  }
  if (record.repr && !is_valid_repr_tag(*record.repr)) {
    throw RecordError("record " + record.id + " has unknown repr tag '" + *record.repr + "'");
  }
  ParseError error(ParseErrorKind::kUnbalancedBrackets, 0);
  auto parse = try_parse_seqlogical(record.seqlogical, &error);
  if (!parse) {
    throw RecordError("record " + record.id + " seqlogical does not parse: " +
                      std::string(error.what()));
  }
  if (extract_transcript(*parse) != record.transcript) {
    throw RecordError("record " + record.id +
                      " transcript does not match the parse's tokens");
  }
}

}  // namespace semforge
