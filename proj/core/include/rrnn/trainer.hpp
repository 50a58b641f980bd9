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

#ifndef RRNN_TRAINER_HPP_
#define RRNN_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrnn/adam.hpp"
#include "rrnn/data.hpp"
#include "rrnn/model.hpp"
#include "rrnn/predictor.hpp"

namespace rrnn {

struct TrainConfig {
  double learning_rate = 0.0025;
  std::size_t batch_size = 128;
  std::size_t epochs = 2000;
  std::size_t seq_len_pred = 50;
  std::size_t seq_len_init = 50;
  std::size_t init_epochs = 400;
  double nu0 = 0.001;
  double nu_decay_factor = 10.0;
  std::size_t nu_decay_every = 100;
  std::size_t backtrack_steps = 100;
  std::uint64_t seed = 0;
  // Wall-clock timing makes logs differ between runs; off by default so that
  // identical configs give byte-identical logs.
  bool record_wall_time = false;

  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// nu0 / nu_decay_factor^floor(epoch / nu_decay_every), epochs counted from 0.
double NuAt(const TrainConfig& config, std::size_t epoch);

// (1/T) sum_k |y_hat^k - y^k|^2 for channel-major sequences.
double MeanSquaredError(const Matrix& y, const Matrix& y_hat);

// MeanSquaredError plus nu * (-log det(-M(p))) when `constrained`. Throws
// DefinitenessError if constrained and p is infeasible.
double Loss(const Matrix& y, const Matrix& y_hat, const TildeParams& p,
            double nu, bool constrained);

struct Sample {
  Vector x0;
  Matrix u;
  Matrix y;
};

struct BatchGradient {
  double loss = 0.0;
  double mse = 0.0;
  double barrier = 0.0;  // -log det(-M), crnn only
  Vector grad;           // flat, in Predictor::FlatParams order
};

// Exact gradient of the batch-mean loss, unrolled over each full window.
// For crnn the barrier term nu * (-log det(-M)) is included. Throws
// NumericError if the loss or any gradient entry is not finite.
BatchGradient BpttGradients(const Predictor& model,
                            std::span<const Sample> batch, double nu);

enum class LineSearchStatus { kAccepted, kBacktracked, kStopTraining };

struct LineSearchResult {
  TildeParams params;
  LineSearchStatus status = LineSearchStatus::kAccepted;
  double tau = 1.0;
  std::size_t halvings = 0;
};

// Tries p_old + tau (p_proposed - p_old) for tau = 1, 1/2, ..., 2^-max_halvings
// and returns the first feasible point. If none is feasible the status is
// kStopTraining and p_old is returned unchanged.
LineSearchResult ConstrainedUpdate(const TildeParams& p_old,
                                   const TildeParams& p_proposed,
                                   double margin, std::size_t max_halvings);

enum class TrainStatus { kCompleted, kStoppedByLineSearch, kNumericFailure };

std::string_view StatusName(TrainStatus status);

struct EpochLog {
  std::string phase;  // "initializer" or "predictor"
  std::size_t epoch = 0;
  double mse = 0.0;
  std::optional<double> barrier;      // -log det(-M)
  std::optional<double> nu_barrier;   // nu * -log det(-M)
  double nu = 0.0;
  std::optional<double> feasibility_margin;  // -lambda_max(M)
  std::optional<bool> feasible;
  double grad_norm = 0.0;  // largest batch gradient norm in the epoch
  std::size_t backtrack_count = 0;
  std::size_t skipped_steps = 0;
  std::size_t accepted_steps = 0;
  // crnn: accepted steps after which Feasible(p, margin) did not hold.
  std::size_t infeasible_steps = 0;
  double wall_time = 0.0;
};

struct TrainData {
  std::vector<Window> windows;
  Normalization normalization;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochLog> log;
  TrainStatus status = TrainStatus::kCompleted;
  std::size_t accepted_steps = 0;
  // crnn: Feasible(p, margin) re-checked after every accepted update.
  bool every_step_feasible = true;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Trains the initializer LSTM on the warmup slices, then the predictor on
// the prediction slices with x0 from the trained initializer.
LstmInitializer TrainInitializer(const ModelSpec& spec,
                                 const std::vector<Window>& windows,
                                 const TrainConfig& config,
                                 const EpochCallback& on_epoch = {});

TrainResult Train(const ModelSpec& spec, const TrainData& data,
                  const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace rrnn

#endif  // RRNN_TRAINER_HPP_
