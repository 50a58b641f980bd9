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

// Reference computations used by the tests. They deliberately avoid the
// library's own factorizations so that agreement is meaningful.

#ifndef RRNN_TESTS_ORACLES_HPP_
#define RRNN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rrnn::testing {

// Cyclic Jacobi rotations on a plain copy; returns eigenvalues ascending.
inline std::vector<double> JacobiEigenvalues(const Eigen::MatrixXd& sym) {
  const int n = static_cast<int>(sym.rows());
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = 0.5 * (sym(i, j) + sym(j, i));
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline Eigen::MatrixXd RandomSymmetric(int n, std::mt19937_64& rng,
                                       double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = d(rng);
  }
  return m;
}

inline Eigen::MatrixXd RandomSpd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = d(rng);
  }
  return g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::MatrixXd RandomMatrix(int r, int c, std::mt19937_64& rng,
                                    double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  }
  return m;
}

// Central difference of f along `direction` with step h.
inline double CentralDifference(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Eigen::VectorXd& direction,
    double h = 1e-6) {
  return (f(x + h * direction) - f(x - h * direction)) / (2.0 * h);
}

// Squared peak gain of the scalar system x+ = a x + b u, y = c x over a
// dense frequency grid on [0, pi].
inline double ScalarPeakGainSquared(double a, double b, double c,
                                    int points = 20001) {
  double best = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = M_PI * i / (points - 1);
    const std::complex<double> z = std::polar(1.0, w);
    best = std::max(best, std::norm(c * b / (z - a)));
  }
  return best;
}

}  // namespace rrnn::testing

#endif  // RRNN_TESTS_ORACLES_HPP_
