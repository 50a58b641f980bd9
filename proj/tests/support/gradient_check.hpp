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

#ifndef RRNN_TESTS_GRADIENT_CHECK_HPP_
#define RRNN_TESTS_GRADIENT_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rrnn/params.hpp"
#include "support/oracles.hpp"

namespace rrnn::testing {

struct GradientCheck {
  double max_rel_error = 0.0;
  std::string worst_block;
  std::size_t directions = 0;
};

// Compares `grad` (flat, ForEachBlock order) against central differences of
// f. A block named "X" is treated as symmetric: entries (i, j) and (j, i)
// move together, so the expected value is <grad, E>. The relative error uses
// max(|analytic|, |numeric|, floor) as denominator.
template <typename P>
GradientCheck CheckGradient(const P& p, const Vector& grad,
                            const std::function<double(const P&)>& f,
                            double h = 1e-6, double floor = 1e-2) {
  struct Block {
    std::string name;
    Eigen::Index offset, rows, cols;
  };
  std::vector<Block> blocks;
  Eigen::Index offset = 0;
  p.ForEachBlock([&](std::string_view name, const auto& b) {
    blocks.push_back({std::string(name), offset, b.rows(), b.cols()});
    offset += b.size();
  });
  const Vector x = Flatten(p);
  auto eval = [&](const Vector& v) {
    P q = p;
    Unflatten(q, v);
    return f(q);
  };
  GradientCheck out;
  for (const Block& b : blocks) {
    const bool symmetric = b.name == "X";
    for (Eigen::Index j = 0; j < b.cols; ++j) {
      for (Eigen::Index i = 0; i < b.rows; ++i) {
        if (symmetric && i < j) continue;
        Vector dir = Vector::Zero(x.size());
        dir(b.offset + j * b.rows + i) = 1.0;
        if (symmetric && i != j) dir(b.offset + i * b.rows + j) = 1.0;
        const double numeric = CentralDifference(eval, x, dir, h);
        const double analytic = grad.dot(dir);
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), floor});
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel > out.max_rel_error) {
          out.max_rel_error = rel;
          out.worst_block = b.name;
        }
        ++out.directions;
      }
    }
  }
  return out;
}

}  // namespace rrnn::testing

#endif  // RRNN_TESTS_GRADIENT_CHECK_HPP_
