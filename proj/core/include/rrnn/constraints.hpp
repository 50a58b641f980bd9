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

#ifndef RRNN_CONSTRAINTS_HPP_
#define RRNN_CONSTRAINTS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rrnn/model.hpp"
#include "rrnn/numkit.hpp"

namespace rrnn {

// Block rows/columns of the constraint matrix, in order.
enum class LmiBlock : std::size_t {
  kState = 0,        // -X row
  kGain = 1,         // -gamma^2 I row
  kMultiplier = 2,   // -2T row
  kStateUpdate = 3,  // second -X row
  kOutput = 4,       // -I row
};

struct BlockLayout {
  std::array<std::size_t, 5> offset{};
  std::array<std::size_t, 5> size{};

  static BlockLayout For(const Dims& dims);

  std::size_t dim() const { return offset[4] + size[4]; }
  std::size_t Offset(LmiBlock b) const {
    return offset[static_cast<std::size_t>(b)];
  }
  std::size_t Size(LmiBlock b) const {
    return size[static_cast<std::size_t>(b)];
  }
  static std::string_view Name(LmiBlock b);
};

//       [ -X     0       C2_t^T   A_t^T    C1^T  ]
//       [  0    -g^2 I   D21_t^T  B1_t^T   D11^T ]
//   M = [ C2_t   D21_t   -2T      B2_t^T   D12^T ]
//       [ A_t    B1_t    B2_t     -X       0     ]
//       [ C1     D11     D12      0        -I    ]
struct ConstraintMatrix {
  SymmetricMatrix m;
  BlockLayout layout;
};

ConstraintMatrix AssembleConstraintMatrix(const TildeParams& p);

// Margin used for feasibility checks during training: 1e-8 * dim(M).
double TrainingMargin(const Dims& dims);

// True iff M(p) is negative definite with the given margin. Never throws on
// numerically bad parameters; those are simply infeasible.
bool Feasible(const TildeParams& p, double margin);

// Largest eigenvalue of M(p). Diagnostic only; feasibility decisions go
// through Feasible().
double MaxEigenvalue(const ConstraintMatrix& c);

// X = I, T = I and every system block drawn i.i.d. from U[-scale, scale]
// (row-major within each block, blocks in ForEachBlock order), then halved
// until Feasible(p, margin) holds. Throws DefinitenessError after 60 halvings.
TildeParams InitFeasible(const Dims& dims, double gamma_sq, double scale,
                         std::uint64_t seed, double margin);
TildeParams InitFeasible(const Dims& dims, double gamma_sq, double scale,
                         std::uint64_t seed);

// -log det(-M(p)). Throws DefinitenessError if M(p) is not negative definite.
double Barrier(const TildeParams& p);

// Gradient of Barrier() with respect to every block of p. With N = (-M)^-1,
// an off-diagonal block such as A_t receives 2 N_(4,1); X receives
// -(N_(1,1) + N_(4,4)), which is symmetric, and T_i receives -2 N_(3,3)_ii.
// The gamma_sq field of the result holds d/d(gamma^2) = -tr N_(2,2).
TildeParams BarrierGradient(const TildeParams& p);

// Per-step check of the storage-function argument with V(x) = x^T X x:
//   s_k = V(x^{k+1}) - V(x^k) - gamma^2 |u^k|^2 + |y^k|^2  (must be < 0)
// plus the summed bound  sum |y|^2 <= gamma^2 sum |u|^2 + x0^T X x0.
struct DissipationReport {
  std::size_t steps = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;
  std::size_t worst_step = 0;
  double output_energy = 0.0;
  double input_energy = 0.0;
  double gamma_sq = 0.0;
  double gamma0 = 0.0;
  // output_energy - gamma_sq * input_energy - gamma0; must be <= tolerance.
  double bound_slack = 0.0;
  bool bound_holds = true;
  double tolerance = 0.0;
  std::vector<double> slacks;

  bool passed() const { return violations == 0 && bound_holds; }
};

struct VerifyOptions {
  double tolerance = 1e-9;
  bool keep_slacks = false;
};

// Total: reports violations instead of throwing when p is infeasible (X is
// then inverted via LU).
DissipationReport VerifyDissipation(const TildeParams& p, const Vector& x0,
                                    const Matrix& u,
                                    const VerifyOptions& options = {});

// Incremental counterpart for two inputs driven from the same x0, with
// Delta V(x) = dx^T X dx; the summed bound has no offset term.
DissipationReport VerifyIncrementalDissipation(
    const TildeParams& p, const Vector& x0, const Matrix& u_a,
    const Matrix& u_b, const VerifyOptions& options = {});

struct MultiplierPair {
  SymmetricMatrix p_sect;   // [[-2T, (a+b)T], [(a+b)T, -2abT]]
  SymmetricMatrix p_slope;  // [[-2T, (m+e)T], [(m+e)T, -2meT]]
};

// Throws DefinitenessError if any entry of t_diag is nonpositive.
MultiplierPair MultiplierMatrices(const SectorBounds& sb, const Vector& t_diag);

// [w; z]^T P [w; z].
double MultiplierForm(const SymmetricMatrix& p, const Vector& w,
                      const Vector& z);

}  // namespace rrnn

#endif  // RRNN_CONSTRAINTS_HPP_
