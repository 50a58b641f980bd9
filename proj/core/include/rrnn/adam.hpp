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

#ifndef RRNN_ADAM_HPP_
#define RRNN_ADAM_HPP_

#include <cstddef>

#include "rrnn/numkit.hpp"

namespace rrnn {

// Moment estimates for Adam over a flat parameter vector.
struct AdamState {
  Vector m;
  Vector v;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t n = 0)
      : m(Vector::Zero(static_cast<Eigen::Index>(n))),
        v(Vector::Zero(static_cast<Eigen::Index>(n))) {}
};

// One bias-corrected Adam step; advances `state` and returns the proposed
// parameters (no feasibility guarantee).
Vector AdamStep(AdamState& state, const Vector& params, const Vector& grad,
                double lr);

}  // namespace rrnn

#endif  // RRNN_ADAM_HPP_
