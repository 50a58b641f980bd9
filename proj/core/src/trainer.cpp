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

#include "rrnn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "rrnn/constraints.hpp"
#include "rrnn/errors.hpp"
#include "rrnn/gradients.hpp"
#include "rrnn/params.hpp"

namespace rrnn {

namespace {

constexpr double kGradientSkipThreshold = 1e12;

// Distinct, reproducible streams derived from the configured seed.
constexpr std::uint64_t kInitializerStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kPredictorStream = 0xbf58476d1ce4e5b9ULL;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::vector<std::size_t>> ShuffledBatches(std::size_t count,
                                                      std::size_t batch_size,
                                                      std::mt19937_64& rng) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < count; i += batch_size) {
    const std::size_t end = std::min(count, i + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

void RequireFiniteGradient(const Vector& g, double loss) {
  if (!std::isfinite(loss) || !g.allFinite()) {
    throw NumericError("non-finite loss or gradient during training");
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(nu0 > 0.0)) throw ConfigError("nu0 must be > 0");
  if (!(nu_decay_factor > 0.0)) {
    throw ConfigError("nu_decay_factor must be > 0");
  }
  if (batch_size == 0 || epochs == 0 || seq_len_pred == 0 ||
      seq_len_init == 0 || init_epochs == 0 || nu_decay_every == 0 ||
      backtrack_steps == 0) {
    throw ConfigError("training counts must be positive");
  }
}

double NuAt(const TrainConfig& config, std::size_t epoch) {
  const auto decays = static_cast<double>(epoch / config.nu_decay_every);
  return config.nu0 / std::pow(config.nu_decay_factor, decays);
}

double MeanSquaredError(const Matrix& y, const Matrix& y_hat) {
  if (y.rows() != y_hat.rows() || y.cols() != y_hat.cols()) {
    throw ShapeError("loss: sequences differ in shape");
  }
  if (y.cols() == 0) throw ShapeError("loss: empty sequence");
  return (y_hat - y).squaredNorm() / static_cast<double>(y.cols());
}

double Loss(const Matrix& y, const Matrix& y_hat, const TildeParams& p,
            double nu, bool constrained) {
  const double mse = MeanSquaredError(y, y_hat);
  return constrained ? mse + nu * Barrier(p) : mse;
}

BatchGradient BpttGradients(const Predictor& model,
                            std::span<const Sample> batch, double nu) {
  if (batch.empty()) throw ShapeError("bptt: empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  BatchGradient out;
  out.grad = Vector::Zero(static_cast<Eigen::Index>(model.ParamCount()));
  for (const Sample& s : batch) {
    const double scale = 2.0 / static_cast<double>(s.y.cols()) * inv_batch;
    double mse = 0.0;
    Predictor::Pass pass = model.ForwardBackward(
        s.x0, s.u,
        [&](const Matrix& y_hat) -> Matrix {
          mse = MeanSquaredError(s.y, y_hat);
          return scale * (y_hat - s.y);
        },
        /*want_param_grad=*/true);
    out.mse += mse * inv_batch;
    out.grad += pass.param_grad;
  }
  out.loss = out.mse;
  if (model.kind() == ModelKind::kCrnn) {
    out.barrier = Barrier(model.tilde());
    out.loss += nu * out.barrier;
    out.grad += nu * Flatten(BarrierGradient(model.tilde()));
  }
  RequireFiniteGradient(out.grad, out.loss);
  return out;
}

LineSearchResult ConstrainedUpdate(const TildeParams& p_old,
                                   const TildeParams& p_proposed,
                                   double margin, std::size_t max_halvings) {
  const Vector old_flat = Flatten(p_old);
  const Vector step = Flatten(p_proposed) - old_flat;
  double tau = 1.0;
  for (std::size_t halvings = 0; halvings <= max_halvings; ++halvings) {
    TildeParams candidate = p_old;
    Unflatten(candidate, old_flat + tau * step);
    candidate.SymmetrizeX();
    if (candidate.t.allFinite() && Feasible(candidate, margin)) {
      return LineSearchResult{std::move(candidate),
                              halvings == 0 ? LineSearchStatus::kAccepted
                                            : LineSearchStatus::kBacktracked,
                              tau, halvings};
    }
    tau *= 0.5;
  }
  return LineSearchResult{p_old, LineSearchStatus::kStopTraining, 0.0,
                          max_halvings};
}

std::string_view StatusName(TrainStatus status) {
  switch (status) {
    case TrainStatus::kCompleted:
      return "completed";
    case TrainStatus::kStoppedByLineSearch:
      return "stopped_by_line_search";
    case TrainStatus::kNumericFailure:
      return "numeric_failure";
  }
  return "unknown";
}

LstmInitializer TrainInitializer(const ModelSpec& spec,
                                 const std::vector<Window>& windows,
                                 const TrainConfig& config,
                                 const EpochCallback& on_epoch) {
  if (windows.empty()) throw DataError("initializer: no training windows");
  const Dims& d = spec.dims;
  std::mt19937_64 rng(config.seed ^ kInitializerStream);
  LstmInitializer net =
      LstmNetwork::Random(d.n_u + d.n_y, d.n_x, d.n_y, spec.init_layers, rng);
  AdamState adam(ParamCount(net));
  const Stopwatch clock(config.record_wall_time);
  const Vector h0 = Vector::Zero(static_cast<Eigen::Index>(d.n_x));

  for (std::size_t epoch = 0; epoch < config.init_epochs; ++epoch) {
    EpochLog log;
    log.phase = "initializer";
    log.epoch = epoch;
    double mse_sum = 0.0;
    const auto batches = ShuffledBatches(windows.size(), config.batch_size, rng);
    for (const auto& batch : batches) {
      const double inv_batch = 1.0 / static_cast<double>(batch.size());
      Vector grad = Vector::Zero(static_cast<Eigen::Index>(ParamCount(net)));
      double batch_mse = 0.0;
      for (std::size_t idx : batch) {
        const Window& w = windows[idx];
        const LstmTrace trace = LstmForward(net, h0, w.warmup);
        batch_mse += MeanSquaredError(w.warmup_y, trace.y) * inv_batch;
        const Matrix dy = (2.0 / static_cast<double>(w.warmup_y.cols()) *
                           inv_batch) *
                          (trace.y - w.warmup_y);
        grad += Flatten(BackpropLstm(net, w.warmup, trace, dy).grad);
      }
      RequireFiniteGradient(grad, batch_mse);
      log.grad_norm = std::max(log.grad_norm, grad.norm());
      mse_sum += batch_mse;
      if (grad.cwiseAbs().maxCoeff() > kGradientSkipThreshold) {
        ++log.skipped_steps;
        continue;
      }
      Unflatten(net, AdamStep(adam, Flatten(net), grad, config.learning_rate));
    }
    log.mse = mse_sum / static_cast<double>(batches.size());
    log.wall_time = clock.Seconds();
    if (on_epoch) on_epoch(log);
  }
  return net;
}

TrainResult Train(const ModelSpec& spec, const TrainData& data,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  spec.Validate();
  config.Validate();
  if (data.windows.empty()) throw DataError("train: no training windows");
  for (const Window& w : data.windows) {
    if (static_cast<std::size_t>(w.u.cols()) != config.seq_len_pred ||
        static_cast<std::size_t>(w.warmup.cols()) != config.seq_len_init) {
      throw DataError("train: window lengths do not match the configuration");
    }
    if (static_cast<std::size_t>(w.u.rows()) != spec.dims.n_u ||
        static_cast<std::size_t>(w.y.rows()) != spec.dims.n_y) {
      throw DataError("train: window channel counts do not match dims");
    }
  }

  std::vector<EpochLog> log;
  auto emit = [&](const EpochLog& entry) {
    log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  };

  LstmInitializer initializer =
      TrainInitializer(spec, data.windows, config, emit);

  std::vector<Sample> samples;
  samples.reserve(data.windows.size());
  for (const Window& w : data.windows) {
    samples.push_back(
        Sample{LstmInitState(initializer, w.warmup).x0, w.u, w.y});
  }

  Predictor model = InitialPredictor(spec, config.seed ^ kPredictorStream);
  const bool constrained = spec.kind == ModelKind::kCrnn;
  const double margin = TrainingMargin(spec.dims);
  AdamState adam(model.ParamCount());
  std::mt19937_64 rng(config.seed);
  const Stopwatch clock(config.record_wall_time);
  TrainResult result{TrainedModel{spec, model, initializer, data.normalization,
                                  config.seq_len_init, data.input_names,
                                  data.output_names},
                     {}, TrainStatus::kCompleted, 0, true};

  for (std::size_t epoch = 0;
       epoch < config.epochs && result.status == TrainStatus::kCompleted;
       ++epoch) {
    EpochLog entry;
    entry.phase = "predictor";
    entry.epoch = epoch;
    entry.nu = NuAt(config, epoch);
    double mse_sum = 0.0;
    std::size_t batches_run = 0;
    const auto batches = ShuffledBatches(samples.size(), config.batch_size, rng);
    for (const auto& batch : batches) {
      std::vector<Sample> chunk;
      chunk.reserve(batch.size());
      for (std::size_t idx : batch) chunk.push_back(samples[idx]);

      BatchGradient bg;
      try {
        bg = BpttGradients(model, chunk, entry.nu);
      } catch (const NumericError&) {
        result.status = TrainStatus::kNumericFailure;
        break;
      }
      mse_sum += bg.mse;
      ++batches_run;
      entry.grad_norm = std::max(entry.grad_norm, bg.grad.norm());
      if (bg.grad.cwiseAbs().maxCoeff() > kGradientSkipThreshold) {
        ++entry.skipped_steps;
        continue;
      }
      const Vector proposed_flat =
          AdamStep(adam, model.FlatParams(), bg.grad, config.learning_rate);

      if (constrained) {
        TildeParams proposed = model.tilde();
        Unflatten(proposed, proposed_flat);
        LineSearchResult ls = ConstrainedUpdate(
            model.tilde(), proposed, margin, config.backtrack_steps);
        entry.backtrack_count += ls.halvings;
        if (ls.status == LineSearchStatus::kStopTraining) {
          result.status = TrainStatus::kStoppedByLineSearch;
          break;
        }
        model = Predictor(spec.kind, std::move(ls.params));
        if (!Feasible(model.tilde(), margin)) {
          ++entry.infeasible_steps;
          result.every_step_feasible = false;
        }
      } else {
        PredictorParams next = model.params();
        std::visit([&](auto& p) { Unflatten(p, proposed_flat); }, next);
        if (auto* lti = std::get_if<TildeParams>(&next)) lti->SymmetrizeX();
        try {
          model = Predictor(spec.kind, std::move(next));
        } catch (const Error&) {
          ++entry.skipped_steps;
          continue;
        }
      }
      ++entry.accepted_steps;
      ++result.accepted_steps;
    }
    entry.mse = batches_run > 0 ? mse_sum / static_cast<double>(batches_run)
                                : 0.0;
    if (constrained) {
      const ConstraintMatrix cm = AssembleConstraintMatrix(model.tilde());
      entry.barrier = Barrier(model.tilde());
      entry.nu_barrier = entry.nu * *entry.barrier;
      entry.feasibility_margin = -MaxEigenvalue(cm);
      entry.feasible = IsNegativeDefinite(cm.m, margin);
    }
    entry.wall_time = clock.Seconds();
    emit(entry);
  }

  result.model.predictor = model;
  result.log = std::move(log);
  return result;
}

}  // namespace rrnn
