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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "rrnn/errors.hpp"
#include "rrnn/numkit.hpp"
#include "support/oracles.hpp"

namespace rrnn {
namespace {

using testing::JacobiEigenvalues;

SymmetricMatrix Sym(const Matrix& m) { return SymmetricMatrix::FromLower(m); }

TEST(Cholesky, IdentityFactorIsIdentity) {
  const CholeskyResult r = Cholesky(SymmetricMatrix::Identity(3));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.factor, Matrix::Identity(3, 3));
}

TEST(Cholesky, TwoByTwoHandFactor) {
  Matrix m(2, 2);
  m << 4, 2, 2, 3;
  const CholeskyResult r = Cholesky(Sym(m));
  ASSERT_TRUE(r.ok());
  Matrix expected(2, 2);
  expected << 2, 0, 1, std::sqrt(2.0);
  EXPECT_LT((*r.factor - expected).norm(), 1e-15);
  EXPECT_LT((*r.factor * r.factor->transpose() - m).norm(), 1e-14);
}

TEST(Cholesky, IndefiniteFailsAtSecondPivot) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  const CholeskyResult r = Cholesky(Sym(m));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failed_pivot, 1u);
}

TEST(Cholesky, ZeroDimensionThrows) {
  EXPECT_THROW(Cholesky(SymmetricMatrix(0)), DefinitenessError);
}

TEST(Cholesky, ReconstructionWithinRelativeTolerance) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 10; ++n) {
    const Matrix m = testing::RandomSpd(n, rng);
    const CholeskyResult r = Cholesky(Sym(m));
    ASSERT_TRUE(r.ok());
    EXPECT_LE((*r.factor * r.factor->transpose() - m).norm(),
              1e-12 * m.norm());
  }
}

TEST(IsNegativeDefinite, Examples) {
  EXPECT_TRUE(IsNegativeDefinite(Sym(-Matrix::Identity(5, 5)), 0.0));
  EXPECT_FALSE(IsNegativeDefinite(Sym(Matrix::Zero(3, 3)), 0.0));
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << -1.0, -1e-9;
  EXPECT_TRUE(IsNegativeDefinite(Sym(d), 0.0));
  EXPECT_FALSE(IsNegativeDefinite(Sym(d), 1e-6));
}

TEST(IsNegativeDefinite, AgreesWithJacobiOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 10);
  std::uniform_real_distribution<double> shift(-3.0, 1.0);
  int agreed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    Matrix m = testing::RandomSymmetric(n, rng);
    m.diagonal().array() += shift(rng) - 1.0;
    const double lmax = JacobiEigenvalues(m).back();
    if (std::abs(lmax) < 1e-9) continue;  // sign ambiguous at this precision
    EXPECT_EQ(IsNegativeDefinite(Sym(m), 0.0), lmax < 0.0) << "trial " << trial;
    ++agreed;
  }
  EXPECT_GE(agreed, 95);
}

TEST(LogDet, Examples) {
  EXPECT_EQ(LogDet(SymmetricMatrix::Identity(4)), 0.0);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2.0, 3.0;
  EXPECT_NEAR(LogDet(Sym(d)), std::log(6.0), 1e-15);
  EXPECT_THROW(LogDet(Sym(-Matrix::Identity(2, 2))), DefinitenessError);
}

TEST(LogDet, MatchesEigenvalueProduct) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 8; ++n) {
    const Matrix m = testing::RandomSpd(n, rng);
    double oracle = 0.0;
    for (double ev : JacobiEigenvalues(m)) oracle += std::log(ev);
    const double got = LogDet(Sym(m));
    EXPECT_LE(std::abs(got - oracle), 1e-8 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(SolveSpd, Examples) {
  std::mt19937_64 rng(3);
  const Matrix rhs = testing::RandomMatrix(3, 2, rng);
  EXPECT_EQ(SolveSpd(SymmetricMatrix::Identity(3), rhs), rhs);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2.0, 4.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected.diagonal() << 0.5, 0.25;
  EXPECT_LT((SolveSpd(Sym(d), Matrix::Identity(2, 2)) - expected).norm(),
            1e-15);
}

TEST(SolveSpd, ResidualOnRandomSpd) {
  std::mt19937_64 rng(23);
  const Matrix m = testing::RandomSpd(6, rng);
  const Matrix rhs = testing::RandomMatrix(6, 3, rng);
  const Matrix s = SolveSpd(Sym(m), rhs);
  EXPECT_LE((m * s - rhs).norm(), 1e-10 * rhs.norm());
}

TEST(SolveSpd, Errors) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_THROW(SolveSpd(Sym(m), Matrix::Identity(2, 2)), DefinitenessError);
  EXPECT_THROW(SolveSpd(SymmetricMatrix::Identity(2), Matrix::Zero(3, 1)),
               ShapeError);
}

TEST(InverseSpd, TimesOriginalIsIdentity) {
  std::mt19937_64 rng(29);
  const Matrix m = testing::RandomSpd(5, rng);
  EXPECT_LT((InverseSpd(Sym(m)).Dense() * m - Matrix::Identity(5, 5)).norm(),
            1e-10);
}

TEST(SymmetricMatrix, StructurallySymmetric) {
  SymmetricMatrix s(3);
  s(2, 0) = 7.0;
  EXPECT_EQ(s(0, 2), 7.0);
  const Matrix d = s.Dense();
  EXPECT_EQ(d, d.transpose());
  const SymmetricMatrix n = s.NegatedShifted(0.5);
  EXPECT_EQ(n(0, 0), -0.5);
  EXPECT_EQ(n(0, 2), -7.0);
}

TEST(MatrixFromRowMajor, ShapeAndFiniteness) {
  const Matrix m = MatrixFromRowMajor(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m(0, 2), 3.0);
  EXPECT_EQ(m(1, 0), 4.0);
  EXPECT_EQ(RowMajorEntries(m), (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(MatrixFromRowMajor(2, 2, {1, 2, 3}), ShapeError);
  EXPECT_THROW(
      MatrixFromRowMajor(1, 2, {1, std::numeric_limits<double>::quiet_NaN()}),
      NumericError);
}

TEST(FormatReal, RoundTripsExactly) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng);
    EXPECT_EQ(std::stod(FormatReal(v)), v);
  }
}

}  // namespace
}  // namespace rrnn
