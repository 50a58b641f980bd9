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

#ifndef RRNN_ERRORS_HPP_
#define RRNN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rrnn {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix or sequence dimensions that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A matrix that was required to be (negative or positive) definite is not.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where finite values are required, or overflow during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (CSV content, missing columns, empty splits).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration or command usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rrnn

#endif  // RRNN_ERRORS_HPP_
