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

#include "rrnn/recurrent.hpp"

#include <cmath>

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

Matrix Uniform(Eigen::Index rows, Eigen::Index cols, double bound,
               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  // Fill in row-major order so the draw sequence does not depend on Eigen's
  // storage order.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

Vector UniformVector(Eigen::Index n, double bound, std::mt19937_64& rng) {
  return Uniform(n, 1, bound, rng).col(0);
}

double Sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void CheckLayers(std::size_t num_layers) {
  if (num_layers == 0) throw ConfigError("recurrent network needs >= 1 layer");
}

void CheckInputs(std::size_t n_in, std::size_t hidden, const Vector& h0,
                 const Matrix& inputs) {
  if (inputs.cols() == 0) throw ShapeError("recurrent forward: empty sequence");
  if (static_cast<std::size_t>(inputs.rows()) != n_in) {
    throw ShapeError("recurrent forward: input width mismatch");
  }
  if (static_cast<std::size_t>(h0.size()) != hidden) {
    throw ShapeError("recurrent forward: initial state size mismatch");
  }
}

}  // namespace

RnnParams RnnParams::Random(std::size_t n_in, std::size_t hidden,
                            std::size_t n_out, std::size_t num_layers,
                            std::mt19937_64& rng) {
  CheckLayers(num_layers);
  const auto h = static_cast<Eigen::Index>(hidden);
  RnnParams p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? n_in : hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in + h));
    p.layers.push_back(RnnLayer{Uniform(h, in, bound, rng),
                                Uniform(h, h, bound, rng),
                                UniformVector(h, bound, rng)});
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  p.readout = Uniform(static_cast<Eigen::Index>(n_out), h, bound, rng);
  p.readout_bias =
      UniformVector(static_cast<Eigen::Index>(n_out), bound, rng);
  return p;
}

RnnParams RnnParams::Zero(std::size_t n_in, std::size_t hidden,
                          std::size_t n_out, std::size_t num_layers) {
  CheckLayers(num_layers);
  const auto h = static_cast<Eigen::Index>(hidden);
  RnnParams p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? n_in : hidden);
    p.layers.push_back(
        RnnLayer{Matrix::Zero(h, in), Matrix::Zero(h, h), Vector::Zero(h)});
  }
  p.readout = Matrix::Zero(static_cast<Eigen::Index>(n_out), h);
  p.readout_bias = Vector::Zero(static_cast<Eigen::Index>(n_out));
  return p;
}

LstmNetwork LstmNetwork::Random(std::size_t n_in, std::size_t hidden,
                                std::size_t n_out, std::size_t num_layers,
                                std::mt19937_64& rng) {
  CheckLayers(num_layers);
  const auto h = static_cast<Eigen::Index>(hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  LstmNetwork p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? n_in : hidden);
    LstmLayer layer{Uniform(4 * h, in, bound, rng),
                    Uniform(4 * h, h, bound, rng),
                    UniformVector(4 * h, bound, rng)};
    // Open forget gates at the start so gradients survive the warmup window.
    layer.bias.segment(h, h).array() += 1.0;
    p.layers.push_back(std::move(layer));
  }
  p.readout = Uniform(static_cast<Eigen::Index>(n_out), h, bound, rng);
  p.readout_bias =
      UniformVector(static_cast<Eigen::Index>(n_out), bound, rng);
  return p;
}

LstmNetwork LstmNetwork::Zero(std::size_t n_in, std::size_t hidden,
                              std::size_t n_out, std::size_t num_layers) {
  CheckLayers(num_layers);
  const auto h = static_cast<Eigen::Index>(hidden);
  LstmNetwork p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? n_in : hidden);
    p.layers.push_back(LstmLayer{Matrix::Zero(4 * h, in),
                                 Matrix::Zero(4 * h, h),
                                 Vector::Zero(4 * h)});
  }
  p.readout = Matrix::Zero(static_cast<Eigen::Index>(n_out), h);
  p.readout_bias = Vector::Zero(static_cast<Eigen::Index>(n_out));
  return p;
}

RnnTrace RnnForward(const RnnParams& p, const Vector& h0,
                    const Matrix& inputs) {
  CheckInputs(p.input_size(), p.hidden_size(), h0, inputs);
  const Eigen::Index steps = inputs.cols();
  const auto hidden = static_cast<Eigen::Index>(p.hidden_size());
  RnnTrace trace;
  trace.h.reserve(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const RnnLayer& layer = p.layers[l];
    const Matrix& below = (l == 0) ? inputs : trace.h[l - 1];
    // Layer l > 0 reads column k + 1 of the layer below (its new state).
    const Eigen::Index shift = (l == 0) ? 0 : 1;
    Matrix h(hidden, steps + 1);
    h.col(0) = h0;
    for (Eigen::Index k = 0; k < steps; ++k) {
      Vector a = layer.bias;
      a.noalias() += layer.w_in * below.col(k + shift);
      a.noalias() += layer.w_rec * h.col(k);
      h.col(k + 1) = a.array().tanh();
    }
    trace.h.push_back(std::move(h));
  }
  const Matrix& top = trace.h.back();
  trace.y = (p.readout * top.rightCols(steps)).colwise() + p.readout_bias;
  return trace;
}

LstmTrace LstmForward(const LstmNetwork& p, const Vector& h0,
                      const Matrix& inputs) {
  CheckInputs(p.input_size(), p.hidden_size(), h0, inputs);
  const Eigen::Index steps = inputs.cols();
  const auto n = static_cast<Eigen::Index>(p.hidden_size());
  LstmTrace trace;
  trace.layers.reserve(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const LstmLayer& layer = p.layers[l];
    const Matrix* below = (l == 0) ? &inputs : &trace.layers[l - 1].h;
    const Eigen::Index shift = (l == 0) ? 0 : 1;
    LstmTrace::Layer t;
    t.gates.resize(4 * n, steps);
    t.c.resize(n, steps + 1);
    t.h.resize(n, steps + 1);
    t.tanh_c.resize(n, steps);
    t.c.col(0).setZero();
    t.h.col(0) = h0;
    Vector a(4 * n);
    for (Eigen::Index k = 0; k < steps; ++k) {
      a = layer.bias;
      a.noalias() += layer.w_in * below->col(k + shift);
      a.noalias() += layer.w_rec * t.h.col(k);
      for (Eigen::Index j = 0; j < n; ++j) {
        t.gates(j, k) = Sigmoid(a(j));
        t.gates(n + j, k) = Sigmoid(a(n + j));
        t.gates(2 * n + j, k) = std::tanh(a(2 * n + j));
        t.gates(3 * n + j, k) = Sigmoid(a(3 * n + j));
        const double c_next = t.gates(n + j, k) * t.c(j, k) +
                              t.gates(j, k) * t.gates(2 * n + j, k);
        t.c(j, k + 1) = c_next;
        t.tanh_c(j, k) = std::tanh(c_next);
        t.h(j, k + 1) = t.gates(3 * n + j, k) * t.tanh_c(j, k);
      }
    }
    trace.layers.push_back(std::move(t));
  }
  const Matrix& top = trace.layers.back().h;
  trace.y = (p.readout * top.rightCols(steps)).colwise() + p.readout_bias;
  return trace;
}

InitStateResult LstmInitState(const LstmInitializer& init,
                              const Matrix& warmup) {
  const Vector h0 = Vector::Zero(static_cast<Eigen::Index>(init.hidden_size()));
  LstmTrace trace = LstmForward(init, h0, warmup);
  return InitStateResult{trace.layers.back().h.rightCols(1),
                         std::move(trace.y)};
}

}  // namespace rrnn
