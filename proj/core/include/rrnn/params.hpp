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

#ifndef RRNN_PARAMS_HPP_
#define RRNN_PARAMS_HPP_

#include <algorithm>
#include <cstddef>
#include <string_view>

#include "rrnn/errors.hpp"
#include "rrnn/numkit.hpp"

namespace rrnn {

// Flat views over any parameter set exposing ForEachBlock(f(name, block)).
// Blocks are concatenated in visitation order, each in Eigen's column-major
// storage order.

template <typename P>
std::size_t ParamCount(const P& p) {
  std::size_t n = 0;
  p.ForEachBlock([&](std::string_view, const auto& block) {
    n += static_cast<std::size_t>(block.size());
  });
  return n;
}

template <typename P>
Vector Flatten(const P& p) {
  Vector out(static_cast<Eigen::Index>(ParamCount(p)));
  Eigen::Index offset = 0;
  p.ForEachBlock([&](std::string_view, const auto& block) {
    std::copy(block.data(), block.data() + block.size(), out.data() + offset);
    offset += block.size();
  });
  return out;
}

template <typename P>
void Unflatten(P& p, const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != ParamCount(p)) {
    throw ShapeError("unflatten: parameter count mismatch");
  }
  Eigen::Index offset = 0;
  p.ForEachBlock([&](std::string_view, auto& block) {
    std::copy(flat.data() + offset, flat.data() + offset + block.size(),
              block.data());
    offset += block.size();
  });
}

}  // namespace rrnn

#endif  // RRNN_PARAMS_HPP_
