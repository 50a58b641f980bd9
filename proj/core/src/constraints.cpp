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

#include "rrnn/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

Eigen::Index Idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

constexpr int kMaxInitHalvings = 60;

}  // namespace

BlockLayout BlockLayout::For(const Dims& d) {
  BlockLayout l;
  l.size = {d.n_x, d.n_u, d.n_z, d.n_x, d.n_y};
  std::size_t acc = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    l.offset[i] = acc;
    acc += l.size[i];
  }
  return l;
}

std::string_view BlockLayout::Name(LmiBlock b) {
  switch (b) {
    case LmiBlock::kState:
      return "state";
    case LmiBlock::kGain:
      return "gain";
    case LmiBlock::kMultiplier:
      return "multiplier";
    case LmiBlock::kStateUpdate:
      return "state_update";
    case LmiBlock::kOutput:
      return "output";
  }
  return "unknown";
}

ConstraintMatrix AssembleConstraintMatrix(const TildeParams& p) {
  const Dims d = p.InferDims();
  p.CheckShapes(d);
  const BlockLayout lay = BlockLayout::For(d);
  const auto n = Idx(lay.dim());
  Matrix dense = Matrix::Zero(n, n);
  auto block = [&](LmiBlock r, LmiBlock c, const Matrix& value) {
    dense.block(Idx(lay.Offset(r)), Idx(lay.Offset(c)), value.rows(),
                value.cols()) = value;
  };
  using B = LmiBlock;
  block(B::kState, B::kState, -p.x);
  block(B::kGain, B::kGain,
        -p.gamma_sq * Matrix::Identity(Idx(d.n_u), Idx(d.n_u)));
  block(B::kMultiplier, B::kState, p.c2_t);
  block(B::kMultiplier, B::kGain, p.d21_t);
  block(B::kMultiplier, B::kMultiplier, Matrix((-2.0 * p.t).asDiagonal()));
  block(B::kStateUpdate, B::kState, p.a_t);
  block(B::kStateUpdate, B::kGain, p.b1_t);
  block(B::kStateUpdate, B::kMultiplier, p.b2_t);
  block(B::kStateUpdate, B::kStateUpdate, -p.x);
  block(B::kOutput, B::kState, p.c1);
  block(B::kOutput, B::kGain, p.d11);
  block(B::kOutput, B::kMultiplier, p.d12);
  block(B::kOutput, B::kOutput, -Matrix::Identity(Idx(d.n_y), Idx(d.n_y)));
  return ConstraintMatrix{SymmetricMatrix::FromLower(dense), lay};
}

double TrainingMargin(const Dims& dims) {
  return 1e-8 * static_cast<double>(BlockLayout::For(dims).dim());
}

bool Feasible(const TildeParams& p, double margin) {
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  return IsNegativeDefinite(c.m, margin);
}

double MaxEigenvalue(const ConstraintMatrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c.m.Dense(),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

TildeParams InitFeasible(const Dims& dims, double gamma_sq, double scale,
                         std::uint64_t seed, double margin) {
  dims.Validate();
  if (!(gamma_sq > 0.0)) {
    throw ConfigError("init_feasible: gamma_sq must be positive");
  }
  TildeParams p = TildeParams::Zero(dims, gamma_sq);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  auto fill = [&](Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) = scale == 0.0 ? 0.0 : dist(rng);
      }
    }
  };
  for (Matrix* m : {&p.a_t, &p.b1_t, &p.b2_t, &p.c1, &p.d11, &p.d12, &p.c2_t,
                    &p.d21_t}) {
    fill(*m);
  }
  for (int halving = 0; halving <= kMaxInitHalvings; ++halving) {
    if (Feasible(p, margin)) return p;
    for (Matrix* m : {&p.a_t, &p.b1_t, &p.b2_t, &p.c1, &p.d11, &p.d12,
                      &p.c2_t, &p.d21_t}) {
      *m *= 0.5;
    }
  }
  throw DefinitenessError("init_feasible: no feasible point after " +
                          std::to_string(kMaxInitHalvings) + " halvings");
}

TildeParams InitFeasible(const Dims& dims, double gamma_sq, double scale,
                         std::uint64_t seed) {
  return InitFeasible(dims, gamma_sq, scale, seed, TrainingMargin(dims));
}

double Barrier(const TildeParams& p) {
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  return -LogDet(c.m.NegatedShifted(0.0));
}

TildeParams BarrierGradient(const TildeParams& p) {
  const ConstraintMatrix c = AssembleConstraintMatrix(p);
  const Matrix n = InverseSpd(c.m.NegatedShifted(0.0)).Dense();
  const BlockLayout& lay = c.layout;
  auto block = [&](LmiBlock r, LmiBlock col) -> Matrix {
    return n.block(Idx(lay.Offset(r)), Idx(lay.Offset(col)), Idx(lay.Size(r)),
                   Idx(lay.Size(col)));
  };
  using B = LmiBlock;
  TildeParams g;
  g.a_t = 2.0 * block(B::kStateUpdate, B::kState);
  g.b1_t = 2.0 * block(B::kStateUpdate, B::kGain);
  g.b2_t = 2.0 * block(B::kStateUpdate, B::kMultiplier);
  g.c1 = 2.0 * block(B::kOutput, B::kState);
  g.d11 = 2.0 * block(B::kOutput, B::kGain);
  g.d12 = 2.0 * block(B::kOutput, B::kMultiplier);
  g.c2_t = 2.0 * block(B::kMultiplier, B::kState);
  g.d21_t = 2.0 * block(B::kMultiplier, B::kGain);
  g.x = -(block(B::kState, B::kState) + block(B::kStateUpdate, B::kStateUpdate));
  g.t = -2.0 * block(B::kMultiplier, B::kMultiplier).diagonal();
  g.gamma_sq = -block(B::kGain, B::kGain).trace();
  return g;
}

namespace {

double Quad(const Matrix& x, const Eigen::Ref<const Vector>& v) {
  return v.dot(x * v);
}

// Recovery for verification: never throws on bad parameters.
bool TryRecover(const TildeParams& p, ExplicitParams& out) {
  try {
    out = RecoverExplicitUnconstrained(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

DissipationReport FailedReport(const TildeParams& p, Eigen::Index steps,
                               const VerifyOptions& options) {
  DissipationReport r;
  r.steps = static_cast<std::size_t>(steps);
  r.violations = r.steps;
  r.gamma_sq = p.gamma_sq;
  r.worst_slack = std::numeric_limits<double>::infinity();
  r.bound_holds = false;
  r.bound_slack = std::numeric_limits<double>::infinity();
  r.tolerance = options.tolerance;
  return r;
}

void Tally(DissipationReport& r, Eigen::Index k, double slack,
           const VerifyOptions& options) {
  if (k == 0 || slack > r.worst_slack) {
    r.worst_slack = slack;
    r.worst_step = static_cast<std::size_t>(k);
  }
  // `!(slack <= tol)` counts NaN as a violation.
  if (!(slack <= options.tolerance)) ++r.violations;
  if (options.keep_slacks) r.slacks.push_back(slack);
}

void FinishBound(DissipationReport& r, const VerifyOptions& options) {
  r.bound_slack = r.output_energy - r.gamma_sq * r.input_energy - r.gamma0;
  r.bound_holds = r.bound_slack <= options.tolerance;
}

}  // namespace

DissipationReport VerifyDissipation(const TildeParams& p, const Vector& x0,
                                    const Matrix& u,
                                    const VerifyOptions& options) {
  ExplicitParams e;
  if (!TryRecover(p, e)) return FailedReport(p, u.cols(), options);
  const SimulationResult sim = Simulate(e, x0, u);
  DissipationReport r;
  r.steps = static_cast<std::size_t>(u.cols());
  r.gamma_sq = p.gamma_sq;
  r.tolerance = options.tolerance;
  r.gamma0 = Quad(p.x, x0);
  double v_now = r.gamma0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const double v_next = Quad(p.x, sim.x.col(k + 1));
    const double uu = u.col(k).squaredNorm();
    const double yy = sim.y.col(k).squaredNorm();
    Tally(r, k, v_next - v_now - p.gamma_sq * uu + yy, options);
    r.input_energy += uu;
    r.output_energy += yy;
    v_now = v_next;
  }
  FinishBound(r, options);
  return r;
}

DissipationReport VerifyIncrementalDissipation(const TildeParams& p,
                                               const Vector& x0,
                                               const Matrix& u_a,
                                               const Matrix& u_b,
                                               const VerifyOptions& options) {
  if (u_a.rows() != u_b.rows() || u_a.cols() != u_b.cols()) {
    throw ShapeError("incremental dissipation: input sequences differ in shape");
  }
  ExplicitParams e;
  if (!TryRecover(p, e)) return FailedReport(p, u_a.cols(), options);
  const SimulationResult a = Simulate(e, x0, u_a);
  const SimulationResult b = Simulate(e, x0, u_b);
  DissipationReport r;
  r.steps = static_cast<std::size_t>(u_a.cols());
  r.gamma_sq = p.gamma_sq;
  r.tolerance = options.tolerance;
  r.gamma0 = 0.0;
  double v_now = 0.0;
  for (Eigen::Index k = 0; k < u_a.cols(); ++k) {
    const double v_next = Quad(p.x, a.x.col(k + 1) - b.x.col(k + 1));
    const double uu = (u_a.col(k) - u_b.col(k)).squaredNorm();
    const double yy = (a.y.col(k) - b.y.col(k)).squaredNorm();
    Tally(r, k, v_next - v_now - p.gamma_sq * uu + yy, options);
    r.input_energy += uu;
    r.output_energy += yy;
    v_now = v_next;
  }
  FinishBound(r, options);
  return r;
}

MultiplierPair MultiplierMatrices(const SectorBounds& sb,
                                  const Vector& t_diag) {
  sb.Validate();
  if (t_diag.size() == 0 || (t_diag.array() <= 0.0).any()) {
    throw DefinitenessError("multipliers: entries of T must be positive");
  }
  const std::size_t nz = static_cast<std::size_t>(t_diag.size());
  auto build = [&](double lo, double hi) {
    SymmetricMatrix m(2 * nz);
    for (std::size_t i = 0; i < nz; ++i) {
      const double t = t_diag(Idx(i));
      m(i, i) = -2.0 * t;
      m(nz + i, i) = (lo + hi) * t;
      m(nz + i, nz + i) = -2.0 * lo * hi * t;
    }
    return m;
  };
  return MultiplierPair{build(sb.alpha, sb.beta), build(sb.mu, sb.eta)};
}

double MultiplierForm(const SymmetricMatrix& p, const Vector& w,
                      const Vector& z) {
  if (w.size() != z.size() ||
      p.dim() != static_cast<std::size_t>(w.size() + z.size())) {
    throw ShapeError("multiplier form: vector sizes do not match matrix");
  }
  Vector v(w.size() + z.size());
  v << w, z;
  return v.dot(p.Dense() * v);
}

}  // namespace rrnn
