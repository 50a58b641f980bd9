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

#ifndef RRNN_GRADIENTS_HPP_
#define RRNN_GRADIENTS_HPP_

#include "rrnn/model.hpp"
#include "rrnn/numkit.hpp"
#include "rrnn/recurrent.hpp"

namespace rrnn {

// Reverse-mode pass through a recorded forward trajectory. `dy` is the
// gradient of the scalar objective with respect to each output column. The
// initial state is treated as a constant.
template <typename P>
struct Backward {
  P grad;
  Matrix input_grad;  // same shape as the input sequence
};

Backward<ExplicitParams> BackpropLti(const ExplicitParams& p, const Matrix& u,
                                     const SimulationResult& sim,
                                     const Matrix& dy);

Backward<RnnParams> BackpropRnn(const RnnParams& p, const Matrix& inputs,
                                const RnnTrace& trace, const Matrix& dy);

Backward<LstmNetwork> BackpropLstm(const LstmNetwork& p, const Matrix& inputs,
                                   const LstmTrace& trace, const Matrix& dy);

// Chains explicit-parameter gradients through A = X^-1 A_t (likewise B1, B2)
// and C2 = T^-1 C2_t (likewise D21). The X gradient is symmetrized, so for a
// symmetric direction E the directional derivative is <grad.x, E>. The
// gamma_sq field of the result is zero.
TildeParams ChainToTilde(const TildeParams& p, const ExplicitParams& e,
                         const ExplicitParams& grad);

}  // namespace rrnn

#endif  // RRNN_GRADIENTS_HPP_
