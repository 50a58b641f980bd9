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

#ifndef RRNN_NUMKIT_HPP_
#define RRNN_NUMKIT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rrnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws NumericError naming `what` if any entry is NaN or infinite.
void RequireFinite(const Matrix& m, std::string_view what);
void RequireFinite(const Vector& v, std::string_view what);

// Builds a matrix from row-major entries; throws ShapeError on a size
// mismatch and NumericError on non-finite entries.
Matrix MatrixFromRowMajor(std::size_t rows, std::size_t cols,
                          const std::vector<double>& entries);
std::vector<double> RowMajorEntries(const Matrix& m);

// Shortest decimal text that parses back to exactly `v`.
std::string FormatReal(double v);

// Symmetric matrix with packed lower-triangle storage. Symmetry is a
// property of the representation: there is no upper triangle to disagree.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim);

  // Reads only the lower triangle of `m` (which must be square).
  static SymmetricMatrix FromLower(const Matrix& m);
  static SymmetricMatrix Identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const {
    return packed_[Index(i, j)];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return packed_[Index(i, j)];
  }

  Matrix Dense() const;

  // Returns -this - shift * I.
  SymmetricMatrix NegatedShifted(double shift) const;

 private:
  std::size_t Index(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

// Outcome of a Cholesky factorization attempt. On success `factor` holds the
// lower-triangular L with L L^T = m; otherwise `failed_pivot` is the index of
// the first pivot that was not strictly positive.
struct CholeskyResult {
  std::optional<Matrix> factor;
  std::size_t failed_pivot = 0;

  bool ok() const { return factor.has_value(); }
};

// Throws DefinitenessError for a zero-dimensional matrix.
CholeskyResult Cholesky(const SymmetricMatrix& m);

// Default definiteness margin for a matrix of the given dimension.
inline double DefaultMargin(std::size_t dim) {
  return 1e-9 * static_cast<double>(dim);
}

// True iff -m - margin * I admits a Cholesky factorization.
bool IsNegativeDefinite(const SymmetricMatrix& m, double margin);

// log det(m) for positive definite m; throws DefinitenessError otherwise.
double LogDet(const SymmetricMatrix& m);

// Solves m S = rhs for positive definite m; throws DefinitenessError if m is
// not positive definite and ShapeError if rhs has the wrong row count.
Matrix SolveSpd(const SymmetricMatrix& m, const Matrix& rhs);

// Inverse of a positive definite matrix, as a symmetric matrix.
SymmetricMatrix InverseSpd(const SymmetricMatrix& m);

}  // namespace rrnn

#endif  // RRNN_NUMKIT_HPP_
