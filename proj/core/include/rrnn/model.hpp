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

#ifndef RRNN_MODEL_HPP_
#define RRNN_MODEL_HPP_

#include <cstddef>
#include <string_view>

#include "rrnn/numkit.hpp"

namespace rrnn {

// Channel counts of the interconnection: n_u inputs, n_y outputs, n_x states
// and n_z nonlinearity channels.
struct Dims {
  std::size_t n_u = 1;
  std::size_t n_y = 1;
  std::size_t n_x = 1;
  std::size_t n_z = 1;

  // Throws ConfigError if any count is zero.
  void Validate() const;

  bool operator==(const Dims&) const = default;
};

// Explicit system matrices of the feedback interconnection
//   x+ = A x + B1 u + B2 w,  y = C1 x + D11 u + D12 w,  z = C2 x + D21 u,
// with w = psi(z) and no bias terms.
struct ExplicitParams {
  Matrix a, b1, b2, c1, d11, d12, c2, d21;

  static ExplicitParams Zero(const Dims& dims);

  // Throws ShapeError if any block disagrees with `dims`.
  void CheckShapes(const Dims& dims) const;
  Dims InferDims() const;

  template <typename F>
  void ForEachBlock(F&& f) {
    VisitImpl(*this, f);
  }
  template <typename F>
  void ForEachBlock(F&& f) const {
    VisitImpl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void VisitImpl(Self& s, F& f) {
    f("A", s.a);
    f("B1", s.b1);
    f("B2", s.b2);
    f("C1", s.c1);
    f("D11", s.d11);
    f("D12", s.d12);
    f("C2", s.c2);
    f("D21", s.d21);
  }
};

// Convexified parameters: A_t = X A, B1_t = X B1, B2_t = X B2,
// C2_t = T C2, D21_t = T D21 with X symmetric positive definite and
// T = diag(t) positive. gamma_sq is the certified (incremental) gain bound and
// is held fixed during training; ForEachBlock only visits trainable blocks.
struct TildeParams {
  Matrix a_t, b1_t, b2_t, c1, d11, d12, c2_t, d21_t;
  Matrix x;
  Vector t;
  double gamma_sq = 1.0;

  // X = I, T = I, every system block zero.
  static TildeParams Zero(const Dims& dims, double gamma_sq);

  void CheckShapes(const Dims& dims) const;
  Dims InferDims() const;

  // Replaces X by (X + X^T) / 2.
  void SymmetrizeX();

  template <typename F>
  void ForEachBlock(F&& f) {
    VisitImpl(*this, f);
  }
  template <typename F>
  void ForEachBlock(F&& f) const {
    VisitImpl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void VisitImpl(Self& s, F& f) {
    f("A_t", s.a_t);
    f("B1_t", s.b1_t);
    f("B2_t", s.b2_t);
    f("C1", s.c1);
    f("D11", s.d11);
    f("D12", s.d12);
    f("C2_t", s.c2_t);
    f("D21_t", s.d21_t);
    f("X", s.x);
    f("T", s.t);
  }
};

// Sector [alpha, beta] and slope [mu, eta] of the scalar nonlinearity.
struct SectorBounds {
  double alpha = 0.0;
  double beta = 1.0;
  double mu = 0.0;
  double eta = 1.0;

  void Validate() const;
};

// Maps tilde parameters back to the explicit system. Throws
// DefinitenessError if X is not positive definite or T has a nonpositive
// entry.
ExplicitParams RecoverExplicit(const TildeParams& p);

// Same map without the definiteness requirement, for the unconstrained
// ltiRNN baseline. Uses the Cholesky path whenever X is positive definite so
// that feasible parameters give bit-identical results to RecoverExplicit;
// falls back to LU otherwise. Throws NumericError if X or T is singular.
ExplicitParams RecoverExplicitUnconstrained(const TildeParams& p);

// Elementwise tanh.
Vector Psi(const Vector& z);

struct StepResult {
  Vector next_state;
  Vector output;
};

StepResult Step(const ExplicitParams& p, const Vector& x, const Vector& u);

// Sequences are stored channel-major: one column per time step.
struct SimulationResult {
  Matrix y;  // n_y x T
  Matrix x;  // n_x x (T + 1), column k is x^k
  Matrix z;  // n_z x T
  Matrix w;  // n_z x T
};

// Runs the interconnection from x0 over the columns of u (n_u x T, T >= 1).
SimulationResult Simulate(const ExplicitParams& p, const Vector& x0,
                          const Matrix& u);

}  // namespace rrnn

#endif  // RRNN_MODEL_HPP_
