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

#ifndef RRNN_TESTS_RANDOM_PARAMS_HPP_
#define RRNN_TESTS_RANDOM_PARAMS_HPP_

#include <random>

#include "rrnn/constraints.hpp"
#include "rrnn/model.hpp"
#include "support/oracles.hpp"

namespace rrnn::testing {

// Feasible tilde parameters with a non-trivial X and T: random SPD X, T in
// [0.5, 1.5], system blocks uniform in [-scale, scale] and halved until
// M(p) is negative definite with the given margin.
inline TildeParams RandomFeasible(const Dims& dims, double gamma_sq,
                                  std::mt19937_64& rng, double scale = 1.0,
                                  double margin = 1e-6) {
  const int n_x = static_cast<int>(dims.n_x);
  TildeParams p = TildeParams::Zero(dims, gamma_sq);
  p.x = 0.2 * RandomSpd(n_x, rng) + Eigen::MatrixXd::Identity(n_x, n_x);
  std::uniform_real_distribution<double> t(0.5, 1.5);
  for (Eigen::Index i = 0; i < p.t.size(); ++i) p.t(i) = t(rng);
  p.ForEachBlock([&](std::string_view name, auto& block) {
    if (name == "X" || name == "T") return;
    block = RandomMatrix(static_cast<int>(block.rows()),
                         static_cast<int>(block.cols()), rng, scale);
  });
  while (!Feasible(p, margin)) {
    p.ForEachBlock([&](std::string_view name, auto& block) {
      if (name == "X" || name == "T") return;
      block *= 0.5;
    });
  }
  return p;
}

inline Dims RandomDims(std::mt19937_64& rng, std::size_t max_io,
                       std::size_t max_state) {
  std::uniform_int_distribution<std::size_t> io(1, max_io);
  std::uniform_int_distribution<std::size_t> st(1, max_state);
  return {io(rng), io(rng), st(rng), st(rng)};
}

}  // namespace rrnn::testing

#endif  // RRNN_TESTS_RANDOM_PARAMS_HPP_
