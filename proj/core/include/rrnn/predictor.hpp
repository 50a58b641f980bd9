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

#ifndef RRNN_PREDICTOR_HPP_
#define RRNN_PREDICTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rrnn/data.hpp"
#include "rrnn/model.hpp"
#include "rrnn/numkit.hpp"
#include "rrnn/recurrent.hpp"

namespace rrnn {

enum class ModelKind {
  kCrnn,    // constrained interconnection, certified by the LMI
  kLtiRnn,  // same interconnection, no constraint
  kRnn,     // stacked tanh RNN with biases
  kLstm,    // stacked LSTM with affine readout
};

std::string_view KindName(ModelKind kind);
// Accepts "crnn", "ltirnn", "rnn", "lstm"; throws ConfigError otherwise.
ModelKind ParseKind(std::string_view name);

inline bool UsesInterconnection(ModelKind k) {
  return k == ModelKind::kCrnn || k == ModelKind::kLtiRnn;
}

using PredictorParams = std::variant<TildeParams, RnnParams, LstmNetwork>;

// A prediction model of any kind. Interconnection kinds keep their
// recovered explicit matrices alongside the trainable parameters.
class Predictor {
 public:
  // Throws ConfigError if the parameter type does not fit the kind, and
  // DefinitenessError/NumericError if explicit recovery fails.
  Predictor(ModelKind kind, PredictorParams params);

  ModelKind kind() const { return kind_; }
  const PredictorParams& params() const { return params_; }
  const TildeParams& tilde() const;
  const ExplicitParams& explicit_params() const;

  std::size_t n_u() const;
  std::size_t n_y() const;
  std::size_t state_size() const;

  std::size_t ParamCount() const;
  Vector FlatParams() const;
  // Same kind and shapes, new values.
  Predictor WithFlatParams(const Vector& flat) const;

  Matrix Predict(const Vector& x0, const Matrix& u) const;

  struct Pass {
    Matrix y;
    Vector param_grad;  // empty unless requested
    Matrix input_grad;
  };

  // Forward pass, then backpropagation of upstream(y) = dJ/dy.
  Pass ForwardBackward(const Vector& x0, const Matrix& u,
                       const std::function<Matrix(const Matrix&)>& upstream,
                       bool want_param_grad) const;

 private:
  ModelKind kind_;
  PredictorParams params_;
  std::optional<ExplicitParams> explicit_;
};

// Fresh predictor for training. Interconnection kinds start from
// X = I, T = I: crnn via the feasible initializer with `init_scale`, ltiRNN
// with blocks drawn from U[-1/sqrt(fan_in), 1/sqrt(fan_in)]. Baselines use
// uniform fan-in scaling.
struct ModelSpec {
  ModelKind kind = ModelKind::kCrnn;
  Dims dims;
  double gamma_sq = 20.0;
  std::size_t layers = 1;       // RNN/LSTM predictor depth
  std::size_t init_layers = 1;  // initializer LSTM depth
  double init_scale = 0.1;      // crnn only

  void Validate() const;
  bool operator==(const ModelSpec&) const = default;
};

Predictor InitialPredictor(const ModelSpec& spec, std::uint64_t seed);

// Everything needed to run a trained model on raw data windows.
struct TrainedModel {
  ModelSpec spec;
  Predictor predictor;
  LstmInitializer initializer;
  Normalization normalization;
  std::size_t t_init = 50;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;

  InitStateResult InitialState(const Matrix& warmup) const {
    return LstmInitState(initializer, warmup);
  }
};

}  // namespace rrnn

#endif  // RRNN_PREDICTOR_HPP_
