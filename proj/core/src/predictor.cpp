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

#include "rrnn/predictor.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rrnn/constraints.hpp"
#include "rrnn/errors.hpp"
#include "rrnn/gradients.hpp"
#include "rrnn/params.hpp"

namespace rrnn {

std::string_view KindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kCrnn:
      return "crnn";
    case ModelKind::kLtiRnn:
      return "ltirnn";
    case ModelKind::kRnn:
      return "rnn";
    case ModelKind::kLstm:
      return "lstm";
  }
  return "unknown";
}

ModelKind ParseKind(std::string_view name) {
  if (name == "crnn") return ModelKind::kCrnn;
  if (name == "ltirnn") return ModelKind::kLtiRnn;
  if (name == "rnn") return ModelKind::kRnn;
  if (name == "lstm") return ModelKind::kLstm;
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected crnn, ltirnn, rnn or lstm)");
}

Predictor::Predictor(ModelKind kind, PredictorParams params)
    : kind_(kind), params_(std::move(params)) {
  const bool ok = (UsesInterconnection(kind) &&
                   std::holds_alternative<TildeParams>(params_)) ||
                  (kind == ModelKind::kRnn &&
                   std::holds_alternative<RnnParams>(params_)) ||
                  (kind == ModelKind::kLstm &&
                   std::holds_alternative<LstmNetwork>(params_));
  if (!ok) {
    throw ConfigError("parameters do not match model kind " +
                      std::string(KindName(kind)));
  }
  if (kind == ModelKind::kCrnn) {
    explicit_ = RecoverExplicit(std::get<TildeParams>(params_));
  } else if (kind == ModelKind::kLtiRnn) {
    explicit_ = RecoverExplicitUnconstrained(std::get<TildeParams>(params_));
  }
}

const TildeParams& Predictor::tilde() const {
  if (!UsesInterconnection(kind_)) {
    throw ConfigError("model kind " + std::string(KindName(kind_)) +
                      " has no interconnection parameters");
  }
  return std::get<TildeParams>(params_);
}

const ExplicitParams& Predictor::explicit_params() const {
  tilde();
  return *explicit_;
}

std::size_t Predictor::n_u() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TildeParams>) {
          return static_cast<std::size_t>(p.b1_t.cols());
        } else {
          return p.input_size();
        }
      },
      params_);
}

std::size_t Predictor::n_y() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TildeParams>) {
          return static_cast<std::size_t>(p.c1.rows());
        } else {
          return p.output_size();
        }
      },
      params_);
}

std::size_t Predictor::state_size() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TildeParams>) {
          return static_cast<std::size_t>(p.a_t.rows());
        } else {
          return p.hidden_size();
        }
      },
      params_);
}

std::size_t Predictor::ParamCount() const {
  return std::visit([](const auto& p) { return rrnn::ParamCount(p); },
                    params_);
}

Vector Predictor::FlatParams() const {
  return std::visit([](const auto& p) { return Flatten(p); }, params_);
}

Predictor Predictor::WithFlatParams(const Vector& flat) const {
  PredictorParams copy = params_;
  std::visit([&](auto& p) { Unflatten(p, flat); }, copy);
  return Predictor(kind_, std::move(copy));
}

Matrix Predictor::Predict(const Vector& x0, const Matrix& u) const {
  switch (kind_) {
    case ModelKind::kCrnn:
    case ModelKind::kLtiRnn:
      return Simulate(*explicit_, x0, u).y;
    case ModelKind::kRnn:
      return RnnForward(std::get<RnnParams>(params_), x0, u).y;
    case ModelKind::kLstm:
      return LstmForward(std::get<LstmNetwork>(params_), x0, u).y;
  }
  throw ConfigError("unknown model kind");
}

Predictor::Pass Predictor::ForwardBackward(
    const Vector& x0, const Matrix& u,
    const std::function<Matrix(const Matrix&)>& upstream,
    bool want_param_grad) const {
  Pass pass;
  switch (kind_) {
    case ModelKind::kCrnn:
    case ModelKind::kLtiRnn: {
      SimulationResult sim = Simulate(*explicit_, x0, u);
      const Matrix dy = upstream(sim.y);
      Backward<ExplicitParams> back = BackpropLti(*explicit_, u, sim, dy);
      if (want_param_grad) {
        pass.param_grad =
            Flatten(ChainToTilde(tilde(), *explicit_, back.grad));
      }
      pass.input_grad = std::move(back.input_grad);
      pass.y = std::move(sim.y);
      break;
    }
    case ModelKind::kRnn: {
      const auto& p = std::get<RnnParams>(params_);
      RnnTrace trace = RnnForward(p, x0, u);
      const Matrix dy = upstream(trace.y);
      Backward<RnnParams> back = BackpropRnn(p, u, trace, dy);
      if (want_param_grad) pass.param_grad = Flatten(back.grad);
      pass.input_grad = std::move(back.input_grad);
      pass.y = std::move(trace.y);
      break;
    }
    case ModelKind::kLstm: {
      const auto& p = std::get<LstmNetwork>(params_);
      LstmTrace trace = LstmForward(p, x0, u);
      const Matrix dy = upstream(trace.y);
      Backward<LstmNetwork> back = BackpropLstm(p, u, trace, dy);
      if (want_param_grad) pass.param_grad = Flatten(back.grad);
      pass.input_grad = std::move(back.input_grad);
      pass.y = std::move(trace.y);
      break;
    }
  }
  return pass;
}

void ModelSpec::Validate() const {
  dims.Validate();
  if (kind == ModelKind::kCrnn && !(gamma_sq > 0.0)) {
    throw ConfigError("crnn requires gamma_sq > 0");
  }
  if (layers == 0 || init_layers == 0) {
    throw ConfigError("layer counts must be positive");
  }
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
}

namespace {

TildeParams RandomLti(const Dims& d, double gamma_sq, std::mt19937_64& rng) {
  TildeParams p = TildeParams::Zero(d, gamma_sq);
  auto fill = [&](Matrix& m, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
    }
  };
  const std::size_t full = d.n_x + d.n_u + d.n_z;
  fill(p.a_t, full);
  fill(p.b1_t, full);
  fill(p.b2_t, full);
  fill(p.c1, full);
  fill(p.d11, full);
  fill(p.d12, full);
  fill(p.c2_t, d.n_x + d.n_u);
  fill(p.d21_t, d.n_x + d.n_u);
  return p;
}

}  // namespace

Predictor InitialPredictor(const ModelSpec& spec, std::uint64_t seed) {
  spec.Validate();
  const Dims& d = spec.dims;
  std::mt19937_64 rng(seed);
  switch (spec.kind) {
    case ModelKind::kCrnn:
      return Predictor(spec.kind, InitFeasible(d, spec.gamma_sq,
                                               spec.init_scale, seed));
    case ModelKind::kLtiRnn:
      return Predictor(spec.kind, RandomLti(d, spec.gamma_sq, rng));
    case ModelKind::kRnn:
      return Predictor(spec.kind, RnnParams::Random(d.n_u, d.n_x, d.n_y,
                                                    spec.layers, rng));
    case ModelKind::kLstm:
      return Predictor(spec.kind, LstmNetwork::Random(d.n_u, d.n_x, d.n_y,
                                                      spec.layers, rng));
  }
  throw ConfigError("unknown model kind");
}

}  // namespace rrnn
