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

#include "rrnn/gradients.hpp"

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

void CheckUpstream(const Matrix& dy, Eigen::Index rows, Eigen::Index cols) {
  if (dy.rows() != rows || dy.cols() != cols) {
    throw ShapeError("backprop: upstream gradient shape mismatch");
  }
}

template <typename P>
P ZeroLike(const P& p) {
  P z = p;
  z.ForEachBlock([](auto&&, auto& block) { block.setZero(); });
  return z;
}

}  // namespace

Backward<ExplicitParams> BackpropLti(const ExplicitParams& p, const Matrix& u,
                                     const SimulationResult& sim,
                                     const Matrix& dy) {
  const Eigen::Index steps = u.cols();
  CheckUpstream(dy, p.c1.rows(), steps);
  Backward<ExplicitParams> out{ZeroLike(p), Matrix::Zero(u.rows(), steps)};
  ExplicitParams& g = out.grad;

  Vector lambda = Vector::Zero(p.a.rows());  // dJ/dx^{k+1}
  Vector gz(p.c2.rows());
  for (Eigen::Index k = steps - 1; k >= 0; --k) {
    const auto x = sim.x.col(k);
    const auto w = sim.w.col(k);
    const auto uk = u.col(k);
    const auto gy = dy.col(k);

    g.c1.noalias() += gy * x.transpose();
    g.d11.noalias() += gy * uk.transpose();
    g.d12.noalias() += gy * w.transpose();
    g.a.noalias() += lambda * x.transpose();
    g.b1.noalias() += lambda * uk.transpose();
    g.b2.noalias() += lambda * w.transpose();

    gz.noalias() = p.d12.transpose() * gy;
    gz.noalias() += p.b2.transpose() * lambda;
    gz.array() *= 1.0 - w.array().square();
    g.c2.noalias() += gz * x.transpose();
    g.d21.noalias() += gz * uk.transpose();

    out.input_grad.col(k).noalias() = p.d11.transpose() * gy;
    out.input_grad.col(k).noalias() += p.b1.transpose() * lambda;
    out.input_grad.col(k).noalias() += p.d21.transpose() * gz;

    Vector next = p.a.transpose() * lambda;
    next.noalias() += p.c1.transpose() * gy;
    next.noalias() += p.c2.transpose() * gz;
    lambda.swap(next);
  }
  return out;
}

Backward<RnnParams> BackpropRnn(const RnnParams& p, const Matrix& inputs,
                                const RnnTrace& trace, const Matrix& dy) {
  const Eigen::Index steps = inputs.cols();
  CheckUpstream(dy, p.readout.rows(), steps);
  Backward<RnnParams> out{ZeroLike(p), Matrix()};
  RnnParams& g = out.grad;

  const Matrix& top = trace.h.back();
  g.readout.noalias() = dy * top.rightCols(steps).transpose();
  g.readout_bias = dy.rowwise().sum();

  // upstream.col(k) is dJ/dh_l^{k+1} from everything above layer l.
  Matrix upstream = p.readout.transpose() * dy;
  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const RnnLayer& layer = p.layers[li];
    RnnLayer& gl = g.layers[li];
    const Matrix& h = trace.h[li];
    const Matrix* below = (li == 0) ? &inputs : &trace.h[li - 1];
    const Eigen::Index shift = (li == 0) ? 0 : 1;
    Matrix down(layer.w_in.cols(), steps);
    Vector carry = Vector::Zero(h.rows());
    Vector da(h.rows());
    for (Eigen::Index k = steps - 1; k >= 0; --k) {
      da = upstream.col(k) + carry;
      da.array() *= 1.0 - h.col(k + 1).array().square();
      gl.w_in.noalias() += da * below->col(k + shift).transpose();
      gl.w_rec.noalias() += da * h.col(k).transpose();
      gl.bias += da;
      carry.noalias() = layer.w_rec.transpose() * da;
      down.col(k).noalias() = layer.w_in.transpose() * da;
    }
    upstream.swap(down);
  }
  out.input_grad = std::move(upstream);
  return out;
}

Backward<LstmNetwork> BackpropLstm(const LstmNetwork& p, const Matrix& inputs,
                                   const LstmTrace& trace, const Matrix& dy) {
  const Eigen::Index steps = inputs.cols();
  CheckUpstream(dy, p.readout.rows(), steps);
  Backward<LstmNetwork> out{ZeroLike(p), Matrix()};
  LstmNetwork& g = out.grad;

  const Matrix& top = trace.layers.back().h;
  g.readout.noalias() = dy * top.rightCols(steps).transpose();
  g.readout_bias = dy.rowwise().sum();

  Matrix upstream = p.readout.transpose() * dy;
  const Eigen::Index n = static_cast<Eigen::Index>(p.hidden_size());
  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const LstmLayer& layer = p.layers[li];
    LstmLayer& gl = g.layers[li];
    const LstmTrace::Layer& t = trace.layers[li];
    const Matrix* below = (li == 0) ? &inputs : &trace.layers[li - 1].h;
    const Eigen::Index shift = (li == 0) ? 0 : 1;
    Matrix down(layer.w_in.cols(), steps);
    Vector carry_h = Vector::Zero(n);
    Vector carry_c = Vector::Zero(n);
    Vector da(4 * n);
    for (Eigen::Index k = steps - 1; k >= 0; --k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double gi = t.gates(j, k);
        const double gf = t.gates(n + j, k);
        const double gg = t.gates(2 * n + j, k);
        const double go = t.gates(3 * n + j, k);
        const double tc = t.tanh_c(j, k);
        const double dh = upstream(j, k) + carry_h(j);
        const double dc = carry_c(j) + dh * go * (1.0 - tc * tc);
        da(j) = dc * gg * gi * (1.0 - gi);
        da(n + j) = dc * t.c(j, k) * gf * (1.0 - gf);
        da(2 * n + j) = dc * gi * (1.0 - gg * gg);
        da(3 * n + j) = dh * tc * go * (1.0 - go);
        carry_c(j) = dc * gf;
      }
      gl.w_in.noalias() += da * below->col(k + shift).transpose();
      gl.w_rec.noalias() += da * t.h.col(k).transpose();
      gl.bias += da;
      carry_h.noalias() = layer.w_rec.transpose() * da;
      down.col(k).noalias() = layer.w_in.transpose() * da;
    }
    upstream.swap(down);
  }
  out.input_grad = std::move(upstream);
  return out;
}

TildeParams ChainToTilde(const TildeParams& p, const ExplicitParams& e,
                         const ExplicitParams& grad) {
  const Eigen::Index nx = p.a_t.cols();
  const Eigen::Index nu = p.b1_t.cols();
  const Eigen::Index nz = p.b2_t.cols();

  Matrix g_stack(nx, nx + nu + nz);
  g_stack << grad.a, grad.b1, grad.b2;
  Matrix e_stack(nx, nx + nu + nz);
  e_stack << e.a, e.b1, e.b2;

  // X is symmetric, so X^-T = X^-1; use the same solver family as the
  // forward recovery.
  Matrix s;
  const SymmetricMatrix x_sym = SymmetricMatrix::FromLower(p.x);
  if (Cholesky(x_sym).ok()) {
    s = SolveSpd(x_sym, g_stack);
  } else {
    s = p.x.transpose().fullPivLu().solve(g_stack);
  }

  TildeParams out;
  out.a_t = s.leftCols(nx);
  out.b1_t = s.middleCols(nx, nu);
  out.b2_t = s.rightCols(nz);
  out.c1 = grad.c1;
  out.d11 = grad.d11;
  out.d12 = grad.d12;
  const Matrix gx = -s * e_stack.transpose();
  out.x = 0.5 * (gx + gx.transpose());

  const Vector t_inv = p.t.cwiseInverse();
  out.c2_t = t_inv.asDiagonal() * grad.c2;
  out.d21_t = t_inv.asDiagonal() * grad.d21;
  out.t = -((grad.c2.cwiseProduct(e.c2)).rowwise().sum() +
            (grad.d21.cwiseProduct(e.d21)).rowwise().sum())
               .cwiseProduct(t_inv);
  out.gamma_sq = 0.0;
  return out;
}

}  // namespace rrnn
