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

#ifndef RRNN_EVALUATION_HPP_
#define RRNN_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrnn/data.hpp"
#include "rrnn/numkit.hpp"
#include "rrnn/predictor.hpp"

namespace rrnn {

inline constexpr std::size_t kDefaultEvalHorizon = 900;

struct MetricsReport {
  std::string split;
  std::vector<std::string> channels;
  Vector rmse;  // per channel, original units
  double mean_rmse = 0.0;
  std::size_t sequence_count = 0;
  std::size_t horizon = 0;  // requested horizon
  std::vector<std::string> warnings;
};

// Per-channel RMSE pooled over every (sequence, step) pair. Sequences are
// channel-major and may differ in length.
MetricsReport RmseFromPairs(const std::vector<Matrix>& truth,
                            const std::vector<Matrix>& prediction);

// An evaluation run: x0 from the initializer on the warmup that precedes the
// prediction slice, signals normalized.
struct EvalSequence {
  Vector x0;
  Matrix u;
  Matrix y;
  std::size_t recording = 0;
  std::size_t start = 0;
};

// One sequence per recording: warmup at samples 1..t_init, prediction from
// t_init + 1 for `horizon` steps, truncated with a warning when the recording
// is shorter. `split` must already be normalized.
std::vector<EvalSequence> EvaluationSequences(
    const TrainedModel& model, const SequenceDataset& split,
    std::size_t horizon, std::vector<std::string>* warnings = nullptr);

// Windowed sequences for gain search: every window of length `horizon` with
// the given stride, x0 from the initializer.
std::vector<EvalSequence> WindowedSequences(const TrainedModel& model,
                                            const SequenceDataset& split,
                                            std::size_t horizon,
                                            std::size_t stride);

// RMSE in original units over a normalized split.
MetricsReport Rmse(const TrainedModel& model, const SequenceDataset& split,
                   std::string_view split_name,
                   std::size_t horizon = kDefaultEvalHorizon);

enum class GainMode { kGain, kIncremental };
enum class AscentMethod { kPlain, kAdam };

std::string_view GainModeName(GainMode mode);
GainMode ParseGainMode(std::string_view name);

struct GainSearchOptions {
  GainMode mode = GainMode::kGain;
  std::size_t steps = 2000;
  double learning_rate = 0.001;
  AscentMethod method = AscentMethod::kPlain;
  // |theta| is projected onto the ball of radius cap_factor * |u|.
  double cap_factor = 10.0;
  double init_noise = 1e-3;  // incremental mode only
  std::uint64_t seed = 0;

  // 2000 steps for the plain gain, 1000 for the incremental gain.
  static GainSearchOptions Defaults(GainMode mode);
  void Validate() const;
};

struct GainSequence {
  Vector x0;
  Matrix u;
};

struct SequenceGain {
  double best = 0.0;
  std::size_t best_step = 0;
  bool failed = false;
  std::string failure;
  bool cap_hit = false;
  std::vector<double> trace;  // ratio at every iterate, starting point first
  double perturbed_input_energy = 0.0;  // denominator at the best iterate
};

struct GainWitness {
  std::size_t sequence = 0;
  Vector x0;
  Matrix input;         // unperturbed u
  Matrix perturbation;  // theta at the best iterate
};

struct GainReport {
  GainMode mode = GainMode::kGain;
  std::vector<SequenceGain> sequences;
  double max_gain = 0.0;
  std::optional<GainWitness> witness;
  std::size_t failures = 0;
  std::size_t steps = 0;
  double learning_rate = 0.0;
  AscentMethod method = AscentMethod::kPlain;
  double cap_factor = 0.0;
  std::string cap_note;
};

// Gradient ascent on the perturbation ratio of each sequence. Deterministic
// for fixed options.
GainReport WorstGain(const Predictor& model,
                     const std::vector<GainSequence>& sequences,
                     const GainSearchOptions& options);

GainReport WorstGain(const TrainedModel& model, const SequenceDataset& split,
                     const GainSearchOptions& options, std::size_t horizon,
                     std::size_t stride);

// Recomputes the ratio for a perturbation; used to check witnesses.
double ReplayGain(const Predictor& model, GainMode mode, const Vector& x0,
                  const Matrix& u, const Matrix& perturbation);

// x0^T X x0 for interconnection models, zero otherwise.
double InitialStateOffset(const Predictor& model, const Vector& x0);

struct ModelSummary {
  std::string name;
  MetricsReport metrics;
  std::optional<GainReport> gain;
  std::optional<GainReport> incremental_gain;
  std::optional<double> configured_gamma_sq;
};

struct ComparisonRow {
  std::string name;
  Vector rmse;
  double mean_rmse = 0.0;
  std::optional<double> gain;
  std::optional<double> incremental_gain;
  std::optional<double> configured_gamma_sq;
};

struct ComparisonTable {
  std::string split;
  std::size_t horizon = 0;
  std::vector<std::string> channels;
  std::vector<ComparisonRow> rows;

  std::string ToCsv() const;
  // (empirical gain, mean RMSE) pairs, one row per model.
  std::string PlotDataCsv() const;
};

// Throws DataError if the reports disagree on split, horizon or channels.
ComparisonTable CompareModels(const std::vector<ModelSummary>& summaries);

}  // namespace rrnn

#endif  // RRNN_EVALUATION_HPP_
