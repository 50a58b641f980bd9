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

#ifndef RRNN_RECURRENT_HPP_
#define RRNN_RECURRENT_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rrnn/numkit.hpp"

namespace rrnn {

// One layer of an Elman network: h' = tanh(W_in x + W_rec h + b).
struct RnnLayer {
  Matrix w_in;
  Matrix w_rec;
  Vector bias;
};

// Stacked tanh RNN with an affine readout from the top hidden state. Every
// layer has the same hidden size and starts from the same initial state.
struct RnnParams {
  std::vector<RnnLayer> layers;
  Matrix readout;
  Vector readout_bias;

  // Uniform fan-in initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static RnnParams Random(std::size_t n_in, std::size_t hidden,
                          std::size_t n_out, std::size_t num_layers,
                          std::mt19937_64& rng);
  static RnnParams Zero(std::size_t n_in, std::size_t hidden,
                        std::size_t n_out, std::size_t num_layers);

  std::size_t input_size() const { return layers.front().w_in.cols(); }
  std::size_t hidden_size() const { return layers.front().w_rec.rows(); }
  std::size_t output_size() const { return readout.rows(); }

  template <typename F>
  void ForEachBlock(F&& f) {
    VisitImpl(*this, f);
  }
  template <typename F>
  void ForEachBlock(F&& f) const {
    VisitImpl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void VisitImpl(Self& s, F& f) {
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
      const std::string prefix = "layer" + std::to_string(l) + ".";
      f(prefix + "w_in", s.layers[l].w_in);
      f(prefix + "w_rec", s.layers[l].w_rec);
      f(prefix + "bias", s.layers[l].bias);
    }
    f(std::string("readout"), s.readout);
    f(std::string("readout_bias"), s.readout_bias);
  }
};

// LSTM layer with gates stacked as [input; forget; cell; output], each block
// `hidden` rows tall:
//   a = W_in x + W_rec h + b
//   i = sigmoid(a_i), f = sigmoid(a_f), g = tanh(a_g), o = sigmoid(a_o)
//   c' = f * c + i * g,  h' = o * tanh(c')
struct LstmLayer {
  Matrix w_in;
  Matrix w_rec;
  Vector bias;
};

// Stacked LSTM with an affine readout from the top hidden state. Used both
// as the unconstrained LSTM predictor and as the initial-state estimator.
struct LstmNetwork {
  std::vector<LstmLayer> layers;
  Matrix readout;
  Vector readout_bias;

  static LstmNetwork Random(std::size_t n_in, std::size_t hidden,
                            std::size_t n_out, std::size_t num_layers,
                            std::mt19937_64& rng);
  static LstmNetwork Zero(std::size_t n_in, std::size_t hidden,
                          std::size_t n_out, std::size_t num_layers);

  std::size_t input_size() const { return layers.front().w_in.cols(); }
  std::size_t hidden_size() const { return layers.front().w_rec.cols(); }
  std::size_t output_size() const { return readout.rows(); }

  template <typename F>
  void ForEachBlock(F&& f) {
    VisitImpl(*this, f);
  }
  template <typename F>
  void ForEachBlock(F&& f) const {
    VisitImpl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void VisitImpl(Self& s, F& f) {
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
      const std::string prefix = "layer" + std::to_string(l) + ".";
      f(prefix + "w_in", s.layers[l].w_in);
      f(prefix + "w_rec", s.layers[l].w_rec);
      f(prefix + "bias", s.layers[l].bias);
    }
    f(std::string("readout"), s.readout);
    f(std::string("readout_bias"), s.readout_bias);
  }
};

using LstmInitializer = LstmNetwork;

// Forward activations kept for backpropagation. Column k of every per-layer
// matrix belongs to time step k; h and c carry an extra leading column for
// the initial state.
struct RnnTrace {
  std::vector<Matrix> h;  // per layer, hidden x (T + 1)
  Matrix y;               // n_out x T
};

struct LstmTrace {
  struct Layer {
    Matrix gates;   // 4 hidden x T, post-activation
    Matrix c;       // hidden x (T + 1)
    Matrix h;       // hidden x (T + 1)
    Matrix tanh_c;  // hidden x T, tanh(c^{k+1})
  };
  std::vector<Layer> layers;
  Matrix y;  // n_out x T
};

// h0 seeds every layer; inputs is n_in x T with T >= 1.
RnnTrace RnnForward(const RnnParams& p, const Vector& h0,
                    const Matrix& inputs);

// h0 seeds every layer's hidden state; the cell state starts at zero.
LstmTrace LstmForward(const LstmNetwork& p, const Vector& h0,
                      const Matrix& inputs);

struct InitStateResult {
  Vector x0;          // final hidden state of the top layer
  Matrix prediction;  // readout per warmup step, n_y x T_init
};

// Runs the initializer over a warmup window whose columns are
// xi^k = [u^k; y^{k-1}], starting from zero hidden and cell state.
InitStateResult LstmInitState(const LstmInitializer& init,
                              const Matrix& warmup);

}  // namespace rrnn

#endif  // RRNN_RECURRENT_HPP_
