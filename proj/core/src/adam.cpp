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

#include "rrnn/adam.hpp"

#include <cmath>

#include "rrnn/errors.hpp"

namespace rrnn {

Vector AdamStep(AdamState& state, const Vector& params, const Vector& grad,
                double lr) {
  if (params.size() != grad.size() || state.m.size() != grad.size()) {
    throw ShapeError("adam: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double m_corr = 1.0 - std::pow(state.beta1, t);
  const double v_corr = 1.0 - std::pow(state.beta2, t);
  const Vector m_hat = state.m / m_corr;
  const Vector v_hat = state.v / v_corr;
  return params -
         lr * (m_hat.array() / (v_hat.array().sqrt() + state.epsilon))
                  .matrix();
}

}  // namespace rrnn
