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

#include "semforge/jat.hpp"

#include <omp.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semforge::jat {

namespace {

// Neumaier-compensated accumulator per component.
struct CompensatedSum {
  std::vector<double> sum;
  std::vector<double> compensation;
  std::uint64_t frames = 0;

  explicit CompensatedSum(int dim) : sum(dim, 0.0), compensation(dim, 0.0) {}

  void add_frame(std::span<const float> row) {
    for (std::size_t d = 0; d < row.size(); ++d) {
      double value = row[d];
      double t = sum[d] + value;
      if (std::abs(sum[d]) >= std::abs(value)) {
        compensation[d] += (sum[d] - t) + value;
      } else {
        compensation[d] += (value - t) + sum[d];
      }
      sum[d] = t;
    }
    ++frames;
  }
};

int checked_dim(std::span<const EmbeddingMatrix> store) {
  if (store.empty()) throw JatError(JatError::Kind::kEmptyStore, "empty embedding store");
  int dim = store[0].dim;
  if (dim <= 0) throw JatError(JatError::Kind::kDimMismatch, "non-positive dim");
  std::uint64_t frames = 0;
  for (const EmbeddingMatrix& matrix : store) {
    if (matrix.dim != dim) {
      throw JatError(JatError::Kind::kDimMismatch,
                     "mixed dims " + std::to_string(dim) + " and " + std::to_string(matrix.dim));
    }
    frames += matrix.frames();
  }
  if (frames == 0) throw JatError(JatError::Kind::kEmptyStore, "store has no frames");
  return dim;
}

MeanEmbedding finalize(const CompensatedSum& acc, int dim) {
  MeanEmbedding mean;
  mean.dim = dim;
  mean.n_frames_seen = acc.frames;
  mean.vector.resize(dim);
  for (int d = 0; d < dim; ++d) {
    mean.vector[d] = (acc.sum[d] + acc.compensation[d]) / static_cast<double>(acc.frames);
  }
  return mean;
}

}  // namespace

MeanEmbedding compute_mean_embedding_serial(std::span<const EmbeddingMatrix> store) {
  int dim = checked_dim(store);
  // Deliberately plain: accumulate and divide.
  std::vector<double> sum(dim, 0.0);
  std::uint64_t frames = 0;
  for (const EmbeddingMatrix& matrix : store) {
    for (std::size_t f = 0; f < matrix.frames(); ++f) {
      std::span<const float> row = matrix.row(f);
      for (int d = 0; d < dim; ++d) sum[d] += row[d];
      ++frames;
    }
  }
  MeanEmbedding mean;
  mean.dim = dim;
  mean.n_frames_seen = frames;
  mean.vector.resize(dim);
  for (int d = 0; d < dim; ++d) mean.vector[d] = sum[d] / static_cast<double>(frames);
  return mean;
}

MeanEmbedding compute_mean_embedding(std::span<const EmbeddingMatrix> store) {
  int dim = checked_dim(store);
  int max_threads = omp_get_max_threads();
  std::vector<CompensatedSum> partials(max_threads, CompensatedSum(dim));

#pragma omp parallel
  {
    CompensatedSum& mine = partials[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(store.size()); ++i) {
      const EmbeddingMatrix& matrix = store[i];
      for (std::size_t f = 0; f < matrix.frames(); ++f) mine.add_frame(matrix.row(f));
    }
  }

  // Merge partials in thread order.
  CompensatedSum total(dim);
  for (const CompensatedSum& partial : partials) {
    if (partial.frames == 0) continue;
    for (int d = 0; d < dim; ++d) {
      double value = partial.sum[d] + partial.compensation[d];
      double t = total.sum[d] + value;
      if (std::abs(total.sum[d]) >= std::abs(value)) {
        total.compensation[d] += (total.sum[d] - t) + value;
      } else {
        total.compensation[d] += (value - t) + total.sum[d];
      }
      total.sum[d] = t;
    }
    total.frames += partial.frames;
  }
  return finalize(total, dim);
}

MeanEmbedding compute_mean_embedding_files(std::span<const std::filesystem::path> paths) {
  if (paths.empty()) throw JatError(JatError::Kind::kEmptyStore, "no feature files");
  CompensatedSum acc(0);
  int dim = 0;
  for (const std::filesystem::path& path : paths) {
    EmbeddingMatrix matrix = read_feature_file(path);
    if (dim == 0) {
      dim = matrix.dim;
      acc = CompensatedSum(dim);
    } else if (matrix.dim != dim) {
      throw JatError(JatError::Kind::kDimMismatch,
                     "feature file " + path.string() + " has dim " +
                         std::to_string(matrix.dim) + ", expected " + std::to_string(dim));
    }
    for (std::size_t f = 0; f < matrix.frames(); ++f) acc.add_frame(matrix.row(f));
  }
  if (acc.frames == 0) throw JatError(JatError::Kind::kEmptyStore, "store has no frames");
  return finalize(acc, dim);
}

EmbeddingMatrix synth_representation(std::string_view transcript, const MeanEmbedding& mean,
                                     int frames_per_token) {
  std::size_t tokens = 0;
  {
    std::istringstream in{std::string(transcript)};
    std::string token;
    while (in >> token) ++tokens;
  }
  if (tokens == 0) {
    throw JatError(JatError::Kind::kEmptyTranscript, "transcript has no tokens");
  }
  if (frames_per_token < 1) throw Error("frames_per_token must be positive");

  EmbeddingMatrix matrix;
  matrix.dim = mean.dim;
  std::size_t rows = tokens * static_cast<std::size_t>(frames_per_token);
  matrix.data.reserve(rows * mean.dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double component : mean.vector) {
      matrix.data.push_back(static_cast<float>(component));
    }
  }
  return matrix;
}

void write_feature_file(const std::filesystem::path& path, const EmbeddingMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "SEMFORGE-FEAT 1 " << matrix.dim << ' ' << matrix.frames() << '\n';
  char buffer[40];
  for (std::size_t f = 0; f < matrix.frames(); ++f) {
    std::span<const float> row = matrix.row(f);
    for (std::size_t d = 0; d < row.size(); ++d) {
      std::snprintf(buffer, sizeof(buffer), "%.9g", row[d]);
      if (d) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

EmbeddingMatrix read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path.string());
  std::string magic;
  int version = 0;
  int dim = 0;
  std::uint64_t frames = 0;
  in >> magic >> version >> dim >> frames;
  if (!in || magic != "SEMFORGE-FEAT" || version != 1 || dim <= 0) {
    throw IoError("bad feature file header in " + path.string());
  }
  EmbeddingMatrix matrix;
  matrix.dim = dim;
  matrix.data.resize(frames * static_cast<std::uint64_t>(dim));
  for (float& value : matrix.data) {
    if (!(in >> value)) throw IoError("truncated feature file " + path.string());
  }
  return matrix;
}

void write_mean_file(const std::filesystem::path& path, const MeanEmbedding& mean) {
  nlohmann::ordered_json json{
      {"dim", mean.dim},
      {"n_frames_seen", mean.n_frames_seen},
      {"vector", mean.vector},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << json.dump(2) << '\n';
}

MeanEmbedding read_mean_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mean file " + path.string());
  nlohmann::json json;
  try {
    in >> json;
    MeanEmbedding mean;
    mean.dim = json.at("dim").get<int>();
    mean.n_frames_seen = json.at("n_frames_seen").get<std::uint64_t>();
    mean.vector = json.at("vector").get<std::vector<double>>();
    return mean;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad mean file " + path.string() + ": " + e.what());
  }
}

AttachResult attach_representations(std::span<const Record> records,
                                    const MeanEmbedding& mean, int frames_per_token,
                                    const std::filesystem::path& out_dir,
                                    const std::string& repr_tag) {
  if (!is_valid_repr_tag(repr_tag)) throw Error("unknown repr tag " + repr_tag);
  std::filesystem::create_directories(out_dir / "feat");

  AttachResult result;
  result.records.reserve(records.size());
  for (const Record& record : records) {
    if (record.embedding_ref) {
      throw Error("record " + record.id + " already has an embedding reference");
    }
    Record updated = record;
    std::istringstream in(record.transcript);
    std::string token;
    if (!(in >> token)) {
      ++result.skipped;
      result.records.push_back(std::move(updated));
      continue;
    }
    EmbeddingMatrix matrix = synth_representation(record.transcript, mean, frames_per_token);
    std::string relative = "feat/" + record.id + ".feat";
    write_feature_file(out_dir / relative, matrix);
    updated.embedding_ref = relative;
    updated.repr = repr_tag;
    result.records.push_back(std::move(updated));
    ++result.written;
  }
  return result;
}

}  // namespace semforge::jat
