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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semforge/errors.hpp"
#include "semforge/record.hpp"

namespace semforge::jat {

class JatError : public Error {
 public:
  enum class Kind { kEmptyStore, kDimMismatch, kEmptyTranscript };

  JatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// One utterance's frame x dim feature block, row-major float32.
struct EmbeddingMatrix {
  int dim = 0;
  std::vector<float> data;

  std::size_t frames() const { return dim ? data.size() / dim : 0; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

struct MeanEmbedding {
  int dim = 0;
  std::vector<double> vector;
  std::uint64_t n_frames_seen = 0;
};

// Component-wise mean over all frames of all utterances (frame-weighted).
// Single pass with Neumaier-compensated per-thread partials; invariant to
// utterance order and chunking within 1e-6 per component.
MeanEmbedding compute_mean_embedding(std::span<const EmbeddingMatrix> store);

// Plain one-accumulator reference used by tests and the benchmark.
MeanEmbedding compute_mean_embedding_serial(std::span<const EmbeddingMatrix> store);

// Streaming variant over feature files; matrices are loaded one at a time.
MeanEmbedding compute_mean_embedding_files(std::span<const std::filesystem::path> paths);

// (token count x frames_per_token) identical rows of the mean vector.
EmbeddingMatrix synth_representation(std::string_view transcript, const MeanEmbedding& mean,
                                     int frames_per_token);

// Feature file format (bit-exact):
//   SEMFORGE-FEAT 1 <dim> <n_frames>
// then n_frames lines of dim space-separated decimals, 9 significant
// digits (lossless for float32).
void write_feature_file(const std::filesystem::path& path, const EmbeddingMatrix& matrix);
EmbeddingMatrix read_feature_file(const std::filesystem::path& path);

// Mean persistence for the CLI (JSON; doubles survive unclipped).
void write_mean_file(const std::filesystem::path& path, const MeanEmbedding& mean);
MeanEmbedding read_mean_file(const std::filesystem::path& path);

struct AttachResult {
  std::vector<Record> records;  // embedding_ref + repr filled in
  std::uint64_t written = 0;
  std::uint64_t skipped = 0;  // empty transcripts
};

// Writes feat/<id>.feat under out_dir for every record and points
// embedding_ref at it (path relative to out_dir). Records must not
// already carry an embedding_ref; rerunning produces identical bytes.
AttachResult attach_representations(std::span<const Record> records,
                                    const MeanEmbedding& mean, int frames_per_token,
                                    const std::filesystem::path& out_dir,
                                    const std::string& repr_tag = "jat");

}  // namespace semforge::jat
