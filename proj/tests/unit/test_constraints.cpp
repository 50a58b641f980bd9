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

#include "rrnn/constraints.hpp"
#include "rrnn/errors.hpp"
#include "rrnn/params.hpp"
#include "support/gradient_check.hpp"
#include "support/oracles.hpp"
#include "support/random_params.hpp"

namespace rrnn {
namespace {

using testing::JacobiEigenvalues;

TildeParams ScalarInstance(double gamma_sq) {
  return TildeParams::Zero({1, 1, 1, 1}, gamma_sq);
}

TEST(Assemble, ZeroBlocksGiveBlockDiagonal) {
  const Dims dims{2, 3, 4, 5};
  const ConstraintMatrix c = AssembleConstraintMatrix(TildeParams::Zero(dims, 5.0));
  Vector diag(c.layout.dim());
  diag << Vector::Constant(4, -1.0), Vector::Constant(2, -5.0),
      Vector::Constant(5, -2.0), Vector::Constant(4, -1.0),
      Vector::Constant(3, -1.0);
  EXPECT_EQ(c.m.Dense(), Matrix(diag.asDiagonal()));
  EXPECT_TRUE(IsNegativeDefinite(c.m, 0.0));
}

TEST(Assemble, ScalarHandExample) {
  TildeParams p = ScalarInstance(5.0);
  p.a_t(0, 0) = 0.1;
  Matrix hand(5, 5);
  hand << -1, 0, 0, 0.1, 0,
           0, -5, 0, 0, 0,
           0, 0, -2, 0, 0,
           0.1, 0, 0, -1, 0,
           0, 0, 0, 0, -1;
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  EXPECT_EQ(c.m.Dense(), hand);
  EXPECT_LT(JacobiEigenvalues(hand).back(), 0.0);
  EXPECT_TRUE(IsNegativeDefinite(c.m, 0.0));
}

TEST(Assemble, BlockPlacementFollowsRowOrder) {
  std::mt19937_64 rng(1);
  const Dims dims{2, 3, 4, 5};
  const TildeParams p = testing::RandomFeasible(dims, 7.0, rng);
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  const Matrix m = c.m.Dense();
  const BlockLayout& l = c.layout;
  auto blk = [&](LmiBlock r, LmiBlock col) {
    return m.block(l.Offset(r), l.Offset(col), l.Size(r), l.Size(col));
  };
  using B = LmiBlock;
  EXPECT_EQ(blk(B::kState, B::kState), -p.x);
  EXPECT_EQ(blk(B::kMultiplier, B::kState), p.c2_t);
  EXPECT_EQ(blk(B::kStateUpdate, B::kState), p.a_t);
  EXPECT_EQ(blk(B::kOutput, B::kState), p.c1);
  EXPECT_EQ(blk(B::kMultiplier, B::kGain), p.d21_t);
  EXPECT_EQ(blk(B::kStateUpdate, B::kGain), p.b1_t);
  EXPECT_EQ(blk(B::kOutput, B::kGain), p.d11);
  EXPECT_EQ(blk(B::kStateUpdate, B::kMultiplier), p.b2_t);
  EXPECT_EQ(blk(B::kOutput, B::kMultiplier), p.d12);
  EXPECT_EQ(blk(B::kMultiplier, B::kMultiplier),
            Matrix((-2.0 * p.t).asDiagonal()));
  EXPECT_EQ(blk(B::kGain, B::kGain), -7.0 * Matrix::Identity(2, 2));
  EXPECT_EQ(blk(B::kOutput, B::kStateUpdate), Matrix::Zero(3, 4));
  EXPECT_EQ((m - m.transpose()).norm(), 0.0);
}

TEST(Feasible, Examples) {
  EXPECT_TRUE(Feasible(TildeParams::Zero({2, 2, 3, 3}, 5.0), 0.0));
  TildeParams p = ScalarInstance(5.0);
  p.a_t(0, 0) = 0.1e6;
  EXPECT_FALSE(Feasible(p, 0.0));
  EXPECT_GT(JacobiEigenvalues(AssembleConstraintMatrix(p).m.Dense()).back(),
            0.0);
}

TEST(Feasible, MarginAboveLargestEigenvalueFails) {
  std::mt19937_64 rng(2);
  const TildeParams p = testing::RandomFeasible({2, 2, 3, 3}, 5.0, rng);
  const double lmax =
      JacobiEigenvalues(AssembleConstraintMatrix(p).m.Dense()).back();
  ASSERT_LT(lmax, 0.0);
  EXPECT_TRUE(Feasible(p, 0.5 * -lmax));
  EXPECT_FALSE(Feasible(p, 1.5 * -lmax));
}

TEST(Feasible, NeverThrowsOnBadNumbers) {
  TildeParams p = ScalarInstance(5.0);
  p.a_t(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(Feasible(p, 0.0));
  p = ScalarInstance(5.0);
  p.x(0, 0) = -1.0;
  EXPECT_FALSE(Feasible(p, 0.0));
}

TEST(Feasible, MonotoneInGamma) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TildeParams p = testing::RandomFeasible({2, 2, 3, 3}, 5.0, rng);
    ASSERT_TRUE(Feasible(p, 0.0));
    p.gamma_sq = 50.0;
    EXPECT_TRUE(Feasible(p, 0.0));
  }
}

TEST(MaxEigenvalue, AgreesWithJacobi) {
  std::mt19937_64 rng(4);
  const TildeParams p = testing::RandomFeasible({2, 1, 3, 2}, 5.0, rng);
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  EXPECT_NEAR(MaxEigenvalue(c), JacobiEigenvalues(c.m.Dense()).back(), 1e-10);
}

TEST(InitFeasible, ZeroScaleGivesZeroBlocks) {
  const TildeParams p = InitFeasible({2, 2, 3, 3}, 5.0, 0.0, 1);
  const TildeParams z = TildeParams::Zero({2, 2, 3, 3}, 5.0);
  EXPECT_EQ(Flatten(p), Flatten(z));
  EXPECT_TRUE(Feasible(p, TrainingMargin({2, 2, 3, 3})));
}

TEST(InitFeasible, LargeInstanceIsFeasible) {
  const Dims dims{6, 5, 64, 64};
  const TildeParams p = InitFeasible(dims, 20.0, 0.1, 7);
  EXPECT_TRUE(Feasible(p, TrainingMargin(dims)));
}

TEST(InitFeasible, Deterministic) {
  const Dims dims{2, 2, 8, 8};
  EXPECT_EQ(Flatten(InitFeasible(dims, 20.0, 0.5, 3)),
            Flatten(InitFeasible(dims, 20.0, 0.5, 3)));
  EXPECT_NE(Flatten(InitFeasible(dims, 20.0, 0.5, 3)),
            Flatten(InitFeasible(dims, 20.0, 0.5, 4)));
}

TEST(Barrier, ScalarZeroInstanceIsMinusLogTwo) {
  EXPECT_NEAR(Barrier(ScalarInstance(1.0)), -std::log(2.0), 1e-15);
}

TEST(Barrier, BlowsUpTowardBoundary) {
  // M for A_t = a on the scalar instance has eigenvalues -1 +- a in the
  // (X, state update) plane, so the boundary is at a = 1.
  double previous = -std::numeric_limits<double>::infinity();
  for (double a : {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999}) {
    TildeParams p = ScalarInstance(1.0);
    p.a_t(0, 0) = a;
    const double b = Barrier(p);
    EXPECT_GT(b, previous);
    previous = b;
  }
  EXPECT_GT(previous, 7.0);
  TildeParams p = ScalarInstance(1.0);
  p.a_t(0, 0) = 1.0;
  EXPECT_THROW(Barrier(p), DefinitenessError);
}

TEST(Barrier, BitExactAcrossCalls) {
  std::mt19937_64 rng(5);
  const TildeParams p = testing::RandomFeasible({2, 2, 4, 4}, 5.0, rng);
  EXPECT_EQ(Barrier(p), Barrier(p));
}

TEST(BarrierGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 12; ++trial) {
    const Dims dims = testing::RandomDims(rng, 4, 4);
    const TildeParams p = testing::RandomFeasible(dims, 5.0, rng, 1.0, 1e-2);
    const TildeParams g = BarrierGradient(p);
    const testing::GradientCheck check = testing::CheckGradient<TildeParams>(
        p, Flatten(g), [](const TildeParams& q) { return Barrier(q); });
    EXPECT_LE(check.max_rel_error, 1e-5)
        << "trial " << trial << " block " << check.worst_block;
  }
}

TEST(BarrierGradient, CouplingBlocksVanishAtZeroInstance) {
  const TildeParams g = BarrierGradient(TildeParams::Zero({2, 2, 3, 3}, 5.0));
  EXPECT_EQ(g.a_t.norm(), 0.0);
  EXPECT_EQ(g.b1_t.norm(), 0.0);
  EXPECT_EQ(g.b2_t.norm(), 0.0);
  EXPECT_EQ(g.c1.norm(), 0.0);
  EXPECT_EQ(g.d11.norm(), 0.0);
  EXPECT_EQ(g.d12.norm(), 0.0);
  EXPECT_EQ(g.c2_t.norm(), 0.0);
  EXPECT_EQ(g.d21_t.norm(), 0.0);
}

TEST(BarrierGradient, GammaDerivativeIsNegative) {
  std::mt19937_64 rng(7);
  TildeParams p = testing::RandomFeasible({2, 2, 3, 3}, 5.0, rng);
  const double analytic = BarrierGradient(p).gamma_sq;
  const double h = 1e-6;
  TildeParams hi = p, lo = p;
  hi.gamma_sq += h;
  lo.gamma_sq -= h;
  const double numeric = (Barrier(hi) - Barrier(lo)) / (2.0 * h);
  EXPECT_LT(analytic, 0.0);
  EXPECT_NEAR(analytic, numeric, 1e-5 * std::abs(numeric));
}

TEST(VerifyDissipation, ZeroInputZeroState) {
  std::mt19937_64 rng(8);
  const TildeParams p = testing::RandomFeasible({2, 2, 3, 3}, 5.0, rng);
  const DissipationReport r =
      VerifyDissipation(p, Vector::Zero(3), Matrix::Zero(2, 50));
  EXPECT_EQ(r.violations, 0u);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_EQ(r.gamma0, 0.0);
  EXPECT_EQ(r.output_energy, 0.0);
  EXPECT_LE(r.worst_slack, 0.0);
}

TEST(VerifyDissipation, FeasibleParamsNeverViolate) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int model = 0; model < 5; ++model) {
    const TildeParams p = testing::RandomFeasible({2, 2, 4, 4}, 5.0, rng);
    for (int s = 0; s < 200; ++s) {
      const Matrix u = testing::RandomMatrix(2, 100, rng, 2.0);
      const Vector x0 = testing::RandomMatrix(4, 1, rng);
      const DissipationReport r = VerifyDissipation(p, x0, u);
      ASSERT_TRUE(r.passed()) << "model " << model << " seq " << s
                              << " worst " << r.worst_slack;
    }
  }
}

TEST(VerifyDissipation, CorruptedParamsReportViolations) {
  std::mt19937_64 rng(10);
  TildeParams p = testing::RandomFeasible({2, 2, 3, 3}, 5.0, rng);
  p.a_t *= 100.0;
  ASSERT_FALSE(Feasible(p, 0.0));
  const Matrix u = testing::RandomMatrix(2, 100, rng);
  DissipationReport r;
  ASSERT_NO_THROW(r = VerifyDissipation(p, Vector::Zero(3), u,
                                        {.tolerance = 1e-9, .keep_slacks = true}));
  EXPECT_GT(r.violations, 0u);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.slacks.size(), 100u);
}

TEST(VerifyIncrementalDissipation, FeasibleParamsNeverViolate) {
  std::mt19937_64 rng(11);
  for (int model = 0; model < 5; ++model) {
    const TildeParams p = testing::RandomFeasible({2, 3, 4, 5}, 20.0, rng);
    for (int s = 0; s < 100; ++s) {
      const Vector x0 = testing::RandomMatrix(4, 1, rng);
      const Matrix ua = testing::RandomMatrix(2, 100, rng, 2.0);
      const Matrix ub = testing::RandomMatrix(2, 100, rng, 2.0);
      const DissipationReport r = VerifyIncrementalDissipation(p, x0, ua, ub);
      ASSERT_TRUE(r.passed()) << "model " << model << " seq " << s;
      EXPECT_EQ(r.gamma0, 0.0);
    }
  }
}

TEST(VerifyIncrementalDissipation, IdenticalInputsGiveZeroEnergy) {
  std::mt19937_64 rng(12);
  const TildeParams p = testing::RandomFeasible({1, 1, 2, 2}, 5.0, rng);
  const Matrix u = testing::RandomMatrix(1, 30, rng);
  const DissipationReport r =
      VerifyIncrementalDissipation(p, Vector::Ones(2), u, u);
  EXPECT_EQ(r.output_energy, 0.0);
  EXPECT_EQ(r.input_energy, 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(Multipliers, TanhDefaultsWithIdentityT) {
  const MultiplierPair mp = MultiplierMatrices(SectorBounds{}, Vector::Ones(2));
  Matrix expected = Matrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = -2.0 * Matrix::Identity(2, 2);
  expected.topRightCorner(2, 2) = Matrix::Identity(2, 2);
  expected.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
  EXPECT_EQ(mp.p_sect.Dense(), expected);
  EXPECT_EQ(mp.p_slope.Dense(), expected);
}

TEST(Multipliers, SectorAndSlopeFormsNonnegative) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> z(-5.0, 5.0), t(0.1, 3.0);
  const int n = 4;
  Vector t_diag(n);
  for (int i = 0; i < n; ++i) t_diag(i) = t(rng);
  const MultiplierPair mp = MultiplierMatrices(SectorBounds{}, t_diag);
  for (int s = 0; s < 2000; ++s) {
    Vector za(n), zb(n);
    for (int i = 0; i < n; ++i) {
      za(i) = z(rng);
      zb(i) = z(rng);
    }
    EXPECT_GE(MultiplierForm(mp.p_sect, Psi(za), za), -1e-12);
    EXPECT_GE(MultiplierForm(mp.p_slope, Psi(za) - Psi(zb), za - zb), -1e-12);
  }
}

TEST(Multipliers, RejectNonpositiveT) {
  EXPECT_THROW(MultiplierMatrices(SectorBounds{}, Vector::Zero(2)),
               DefinitenessError);
  EXPECT_THROW((SectorBounds{2.0, 1.0, 0.0, 1.0}.Validate()), ConfigError);
}

}  // namespace
}  // namespace rrnn
