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

#include "rrnn/numkit.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "rrnn/errors.hpp"

namespace rrnn {

void RequireFinite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

void RequireFinite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

Matrix MatrixFromRowMajor(std::size_t rows, std::size_t cols,
                          const std::vector<double>& entries) {
  if (entries.size() != rows * cols) {
    throw ShapeError("matrix entries: expected " + std::to_string(rows * cols) +
                     " values, got " + std::to_string(entries.size()));
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = entries[i * cols + j];
  }
  RequireFinite(m, "matrix entries");
  return m;
}

std::vector<double> RowMajorEntries(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

std::string FormatReal(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SymmetricMatrix::SymmetricMatrix(std::size_t dim)
    : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

SymmetricMatrix SymmetricMatrix::FromLower(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("symmetric matrix must be square");
  }
  SymmetricMatrix s(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < s.dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      s(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return s;
}

SymmetricMatrix SymmetricMatrix::Identity(std::size_t dim) {
  SymmetricMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s(i, i) = 1.0;
  return s;
}

Matrix SymmetricMatrix::Dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Matrix m(n, n);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return m;
}

SymmetricMatrix SymmetricMatrix::NegatedShifted(double shift) const {
  SymmetricMatrix out(dim_);
  for (std::size_t k = 0; k < packed_.size(); ++k) out.packed_[k] = -packed_[k];
  for (std::size_t i = 0; i < dim_; ++i) out(i, i) -= shift;
  return out;
}

CholeskyResult Cholesky(const SymmetricMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw DefinitenessError("cholesky: zero-dimensional matrix");

  Matrix l = Matrix::Zero(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    double pivot = m(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) -
                   l.row(j).head(j).squaredNorm();
    // `!(pivot > 0)` also rejects NaN.
    if (!(pivot > 0.0)) {
      return CholeskyResult{std::nullopt, static_cast<std::size_t>(j)};
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < static_cast<Eigen::Index>(n); ++i) {
      const double s =
          m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
          l.row(i).head(j).dot(l.row(j).head(j));
      l(i, j) = s / d;
    }
  }
  return CholeskyResult{std::move(l), 0};
}

bool IsNegativeDefinite(const SymmetricMatrix& m, double margin) {
  if (m.dim() == 0) return false;
  return Cholesky(m.NegatedShifted(margin)).ok();
}

namespace {

const Matrix& RequireFactor(const CholeskyResult& chol, const char* op) {
  if (!chol.ok()) {
    throw DefinitenessError(std::string(op) +
                            ": matrix is not positive definite (pivot " +
                            std::to_string(chol.failed_pivot) + ")");
  }
  return *chol.factor;
}

}  // namespace

double LogDet(const SymmetricMatrix& m) {
  const CholeskyResult chol = Cholesky(m);
  const Matrix& l = RequireFactor(chol, "log_det");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sum += 2.0 * std::log(l(i, i));
  return sum;
}

Matrix SolveSpd(const SymmetricMatrix& m, const Matrix& rhs) {
  if (static_cast<std::size_t>(rhs.rows()) != m.dim()) {
    throw ShapeError("solve_spd: rhs has " + std::to_string(rhs.rows()) +
                     " rows, matrix dim is " + std::to_string(m.dim()));
  }
  const CholeskyResult chol = Cholesky(m);
  const Matrix& l = RequireFactor(chol, "solve_spd");
  const auto tri = l.triangularView<Eigen::Lower>();
  Matrix y = tri.solve(rhs);
  return tri.transpose().solve(y);
}

SymmetricMatrix InverseSpd(const SymmetricMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  return SymmetricMatrix::FromLower(SolveSpd(m, Matrix::Identity(n, n)));
}

}  // namespace rrnn
