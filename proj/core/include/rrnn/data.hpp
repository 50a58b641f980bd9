/*
 * Copyright 2026 The rrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RRNN_DATA_HPP_
#define RRNN_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rrnn/numkit.hpp"

namespace rrnn {

// One contiguous measurement run. Columns are time steps.
struct Recording {
  Matrix u;  // n_u x T
  Matrix y;  // n_y x T
  double sample_period = 1.0;
  std::string source;

  std::size_t length() const { return static_cast<std::size_t>(u.cols()); }
};

struct ChannelStats {
  Vector mean;
  Vector std;
};

// Per-channel standardization computed on the training split.
struct Normalization {
  ChannelStats input;
  ChannelStats output;

  static constexpr double kStdFloor = 1e-8;

  Matrix NormalizeInputs(const Matrix& u) const;
  Matrix NormalizeOutputs(const Matrix& y) const;
  Matrix DenormalizeInputs(const Matrix& u) const;
  Matrix DenormalizeOutputs(const Matrix& y) const;

  // Identity transform for the given channel counts.
  static Normalization Identity(std::size_t n_u, std::size_t n_y);
};

struct SequenceDataset {
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<Recording> recordings;

  std::size_t n_u() const { return input_names.size(); }
  std::size_t n_y() const { return output_names.size(); }
  std::size_t TotalSamples() const;
};

struct CsvSchema {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double sample_period = 1.0;
  // Optional column that splits one file into several recordings; rows with
  // equal consecutive values belong to the same recording.
  std::string recording_column = "recording";

  bool operator==(const CsvSchema&) const = default;
};

// One recording per file, or one per distinct `recording_column` run when
// that column is present. Throws DataError with file/row context on missing
// columns, unparsable or non-finite cells, and empty files.
SequenceDataset LoadCsv(const std::vector<std::filesystem::path>& paths,
                        const CsvSchema& schema);

// Writes every recording into one file with a leading recording column.
// Values are printed with round-trip precision.
void WriteCsv(const SequenceDataset& ds, const std::filesystem::path& path);

struct SplitRatios {
  double train = 0.6;
  double val = 0.1;
  double test = 0.3;

  bool operator==(const SplitRatios&) const = default;
};

struct DataSplits {
  SequenceDataset train;
  SequenceDataset val;
  SequenceDataset test;
  Normalization normalization;
};

// Mean and (population) standard deviation per channel over every sample of
// every recording, with the standard deviation floored at kStdFloor.
Normalization ComputeNormalization(const SequenceDataset& train);
SequenceDataset ApplyNormalization(const SequenceDataset& ds,
                                   const Normalization& norm);

// Assigns whole recordings to splits after a seeded shuffle: round(train*N)
// and round(val*N) recordings, the remainder to test. Statistics come from
// the training split only. Throws ConfigError if the ratios do not sum to 1
// and DataError if a split would be empty.
struct RawSplits {
  SequenceDataset train;
  SequenceDataset val;
  SequenceDataset test;
};

// Assigns whole recordings to splits after a seeded shuffle: round(train*N)
// to train, round(val*N) to val, the rest to test. Throws DataError if any
// split would be empty.
RawSplits SplitRecordings(const SequenceDataset& ds, const SplitRatios& ratios,
                          std::uint64_t seed);

DataSplits SplitAndNormalize(const SequenceDataset& ds,
                             const SplitRatios& ratios, std::uint64_t seed);

// A training/evaluation window. With start s, the warmup covers source
// steps s+1 .. s+t_init and its columns are xi^k = [u^k; y^{k-1}]; the
// prediction slice covers s+t_init+1 .. s+t_init+t_pred.
struct Window {
  Matrix warmup;    // (n_u + n_y) x t_init
  Matrix warmup_y;  // n_y x t_init, targets for the initializer readout
  Matrix u;         // n_u x t_pred
  Matrix y;         // n_y x t_pred
  std::size_t recording = 0;
  std::size_t start = 0;
};

// floor((T - t_init - t_pred - 1) / stride) + 1, or 0 when T is too short.
std::size_t WindowCount(std::size_t length, std::size_t t_init,
                        std::size_t t_pred, std::size_t stride);

// Recordings shorter than t_init + t_pred + 1 are skipped; a message is
// appended to `warnings` when given.
std::vector<Window> MakeWindows(const SequenceDataset& split,
                                std::size_t t_init, std::size_t t_pred,
                                std::size_t stride,
                                std::vector<std::string>* warnings = nullptr);

// Ground truth of the synthetic benchmark:
//   x+ = A0 x + B0 u + eps * tanh(W x),  y = C0 x
// with 4 states, 2 inputs, 2 outputs and spectral radius of A0 equal to 0.95.
struct BenchmarkSystem {
  Matrix a0, b0, c0, w;
  double epsilon = 0.3;

  static BenchmarkSystem Default(double epsilon);
  Matrix Simulate(const Matrix& u) const;  // from the zero state
};

struct SyntheticProfile {
  std::size_t recordings = 20;
  std::size_t duration = 1000;
  double amplitude = 1.0;
  double epsilon = 0.3;
  // Out-of-distribution variant: excitation amplitude doubled.
  bool ood = false;
  std::uint64_t seed = 0;

  bool operator==(const SyntheticProfile&) const = default;
};

// Recordings driven by low-pass filtered noise plus held steps and ramps.
SequenceDataset SyntheticBenchmark(const SyntheticProfile& profile);

}  // namespace rrnn

#endif  // RRNN_DATA_HPP_
