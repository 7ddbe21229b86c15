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

#include <json.hpp>

#include <mutex>
#include <ostream>
#include <string_view>

namespace semforge {

// Line-delimited JSON logger. A default-constructed logger discards
// everything; pipelines log to stderr so output directories stay
// byte-reproducible.
class JsonlLogger {
 public:
  JsonlLogger() = default;
  explicit JsonlLogger(std::ostream* out) : out_(out) {}

  void log(std::string_view stage, nlohmann::ordered_json fields = {}) {
    if (!out_) return;
    nlohmann::ordered_json entry;
    entry["stage"] = std::string(stage);
    for (auto& [key, value] : fields.items()) entry[key] = std::move(value);
    std::lock_guard<std::mutex> lock(mutex_);
    *out_ << entry.dump() << '\n';
  }

  bool enabled() const { return out_ != nullptr; }

 private:
  std::ostream* out_ = nullptr;
  std::mutex mutex_;
};

}  // namespace semforge
