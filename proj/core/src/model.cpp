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

#include "rrnn/model.hpp"

#include <string>

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

void ExpectShape(const Matrix& m, std::size_t rows, std::size_t cols,
                 std::string_view name) {
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != cols) {
    throw ShapeError(std::string(name) + ": expected " + std::to_string(rows) +
                     "x" + std::to_string(cols) + ", got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Eigen::Index Idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

void Dims::Validate() const {
  if (n_u == 0 || n_y == 0 || n_x == 0 || n_z == 0) {
    throw ConfigError("dims: all channel counts must be positive");
  }
}

void SectorBounds::Validate() const {
  if (alpha > beta || mu > eta) {
    throw ConfigError("sector bounds: need alpha <= beta and mu <= eta");
  }
}

ExplicitParams ExplicitParams::Zero(const Dims& d) {
  ExplicitParams p;
  p.a = Matrix::Zero(Idx(d.n_x), Idx(d.n_x));
  p.b1 = Matrix::Zero(Idx(d.n_x), Idx(d.n_u));
  p.b2 = Matrix::Zero(Idx(d.n_x), Idx(d.n_z));
  p.c1 = Matrix::Zero(Idx(d.n_y), Idx(d.n_x));
  p.d11 = Matrix::Zero(Idx(d.n_y), Idx(d.n_u));
  p.d12 = Matrix::Zero(Idx(d.n_y), Idx(d.n_z));
  p.c2 = Matrix::Zero(Idx(d.n_z), Idx(d.n_x));
  p.d21 = Matrix::Zero(Idx(d.n_z), Idx(d.n_u));
  return p;
}

Dims ExplicitParams::InferDims() const {
  return Dims{static_cast<std::size_t>(b1.cols()),
              static_cast<std::size_t>(c1.rows()),
              static_cast<std::size_t>(a.rows()),
              static_cast<std::size_t>(c2.rows())};
}

void ExplicitParams::CheckShapes(const Dims& d) const {
  ExpectShape(a, d.n_x, d.n_x, "A");
  ExpectShape(b1, d.n_x, d.n_u, "B1");
  ExpectShape(b2, d.n_x, d.n_z, "B2");
  ExpectShape(c1, d.n_y, d.n_x, "C1");
  ExpectShape(d11, d.n_y, d.n_u, "D11");
  ExpectShape(d12, d.n_y, d.n_z, "D12");
  ExpectShape(c2, d.n_z, d.n_x, "C2");
  ExpectShape(d21, d.n_z, d.n_u, "D21");
}

TildeParams TildeParams::Zero(const Dims& d, double gamma_sq) {
  TildeParams p;
  p.a_t = Matrix::Zero(Idx(d.n_x), Idx(d.n_x));
  p.b1_t = Matrix::Zero(Idx(d.n_x), Idx(d.n_u));
  p.b2_t = Matrix::Zero(Idx(d.n_x), Idx(d.n_z));
  p.c1 = Matrix::Zero(Idx(d.n_y), Idx(d.n_x));
  p.d11 = Matrix::Zero(Idx(d.n_y), Idx(d.n_u));
  p.d12 = Matrix::Zero(Idx(d.n_y), Idx(d.n_z));
  p.c2_t = Matrix::Zero(Idx(d.n_z), Idx(d.n_x));
  p.d21_t = Matrix::Zero(Idx(d.n_z), Idx(d.n_u));
  p.x = Matrix::Identity(Idx(d.n_x), Idx(d.n_x));
  p.t = Vector::Ones(Idx(d.n_z));
  p.gamma_sq = gamma_sq;
  return p;
}

Dims TildeParams::InferDims() const {
  return Dims{static_cast<std::size_t>(b1_t.cols()),
              static_cast<std::size_t>(c1.rows()),
              static_cast<std::size_t>(a_t.rows()),
              static_cast<std::size_t>(t.size())};
}

void TildeParams::CheckShapes(const Dims& d) const {
  ExpectShape(a_t, d.n_x, d.n_x, "A_t");
  ExpectShape(b1_t, d.n_x, d.n_u, "B1_t");
  ExpectShape(b2_t, d.n_x, d.n_z, "B2_t");
  ExpectShape(c1, d.n_y, d.n_x, "C1");
  ExpectShape(d11, d.n_y, d.n_u, "D11");
  ExpectShape(d12, d.n_y, d.n_z, "D12");
  ExpectShape(c2_t, d.n_z, d.n_x, "C2_t");
  ExpectShape(d21_t, d.n_z, d.n_u, "D21_t");
  ExpectShape(x, d.n_x, d.n_x, "X");
  if (static_cast<std::size_t>(t.size()) != d.n_z) {
    throw ShapeError("T: expected " + std::to_string(d.n_z) + " entries");
  }
}

void TildeParams::SymmetrizeX() {
  const Matrix sym = 0.5 * (x + x.transpose());
  x = sym;
}

namespace {

void FillExplicit(const TildeParams& p, const Matrix& x_inv_stack,
                  ExplicitParams& out) {
  const Eigen::Index nx = p.a_t.cols();
  const Eigen::Index nu = p.b1_t.cols();
  const Eigen::Index nz = p.b2_t.cols();
  out.a = x_inv_stack.leftCols(nx);
  out.b1 = x_inv_stack.middleCols(nx, nu);
  out.b2 = x_inv_stack.rightCols(nz);
  out.c1 = p.c1;
  out.d11 = p.d11;
  out.d12 = p.d12;
  const Vector t_inv = p.t.cwiseInverse();
  out.c2 = t_inv.asDiagonal() * p.c2_t;
  out.d21 = t_inv.asDiagonal() * p.d21_t;
}

Matrix StackedStateBlocks(const TildeParams& p) {
  Matrix stack(p.a_t.rows(), p.a_t.cols() + p.b1_t.cols() + p.b2_t.cols());
  stack << p.a_t, p.b1_t, p.b2_t;
  return stack;
}

}  // namespace

ExplicitParams RecoverExplicit(const TildeParams& p) {
  p.CheckShapes(p.InferDims());
  if ((p.t.array() <= 0.0).any()) {
    throw DefinitenessError("recover_explicit: T must have positive entries");
  }
  ExplicitParams out;
  const Matrix solved =
      SolveSpd(SymmetricMatrix::FromLower(p.x), StackedStateBlocks(p));
  FillExplicit(p, solved, out);
  return out;
}

ExplicitParams RecoverExplicitUnconstrained(const TildeParams& p) {
  p.CheckShapes(p.InferDims());
  if ((p.t.array() == 0.0).any()) {
    throw NumericError("recover_explicit: T has a zero entry");
  }
  const Matrix stack = StackedStateBlocks(p);
  const SymmetricMatrix x_sym = SymmetricMatrix::FromLower(p.x);
  ExplicitParams out;
  if (Cholesky(x_sym).ok()) {
    FillExplicit(p, SolveSpd(x_sym, stack), out);
  } else {
    Eigen::FullPivLU<Matrix> lu(p.x);
    if (!lu.isInvertible()) {
      throw NumericError("recover_explicit: X is singular");
    }
    FillExplicit(p, lu.solve(stack), out);
  }
  RequireFinite(out.a, "recovered A");
  return out;
}

Vector Psi(const Vector& z) { return z.array().tanh().matrix(); }

StepResult Step(const ExplicitParams& p, const Vector& x, const Vector& u) {
  if (x.size() != p.a.cols() || u.size() != p.b1.cols()) {
    throw ShapeError("step: state or input size mismatch");
  }
  const Vector z = p.c2 * x + p.d21 * u;
  const Vector w = Psi(z);
  return StepResult{p.a * x + p.b1 * u + p.b2 * w,
                    p.c1 * x + p.d11 * u + p.d12 * w};
}

SimulationResult Simulate(const ExplicitParams& p, const Vector& x0,
                          const Matrix& u) {
  const Dims d = p.InferDims();
  p.CheckShapes(d);
  if (u.cols() == 0) throw ShapeError("simulate: empty input sequence");
  if (static_cast<std::size_t>(u.rows()) != d.n_u ||
      static_cast<std::size_t>(x0.size()) != d.n_x) {
    throw ShapeError("simulate: input or initial state size mismatch");
  }
  const Eigen::Index steps = u.cols();
  SimulationResult r;
  r.x.resize(Idx(d.n_x), steps + 1);
  r.y.resize(Idx(d.n_y), steps);
  r.z.resize(Idx(d.n_z), steps);
  r.w.resize(Idx(d.n_z), steps);
  r.x.col(0) = x0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    r.z.col(k).noalias() = p.c2 * r.x.col(k) + p.d21 * u.col(k);
    r.w.col(k) = r.z.col(k).array().tanh();
    r.y.col(k).noalias() =
        p.c1 * r.x.col(k) + p.d11 * u.col(k) + p.d12 * r.w.col(k);
    r.x.col(k + 1).noalias() =
        p.a * r.x.col(k) + p.b1 * u.col(k) + p.b2 * r.w.col(k);
  }
  return r;
}

}  // namespace rrnn
