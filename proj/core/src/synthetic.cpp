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

#include <algorithm>
#include <cmath>
#include <random>

#include "rrnn/data.hpp"
#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

constexpr std::uint64_t kOodStream = 0x94d049bb133111ebULL;

Matrix ScaledRotation(double radius, double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return radius * r;
}

// Low-pass filtered noise plus a piecewise hold/ramp maneuver, per channel.
Matrix Excitation(std::size_t channels, std::size_t duration, double amplitude,
                  std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> level(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> segment(40, 160);
  std::bernoulli_distribution ramp(0.3);
  const double pole = 0.9;
  const double gain = std::sqrt(1.0 - pole * pole);

  Matrix u(static_cast<Eigen::Index>(channels),
           static_cast<Eigen::Index>(duration));
  for (std::size_t c = 0; c < channels; ++c) {
    const auto row = static_cast<Eigen::Index>(c);
    double filtered = 0.0;
    double from = 0.0;
    double to = level(rng);
    bool ramping = false;
    std::size_t seg_len = segment(rng);
    std::size_t seg_pos = 0;
    for (std::size_t k = 0; k < duration; ++k) {
      if (seg_pos == seg_len) {
        from = to;
        to = level(rng);
        ramping = ramp(rng);
        seg_len = segment(rng);
        seg_pos = 0;
      }
      const double frac =
          ramping ? static_cast<double>(seg_pos) / static_cast<double>(seg_len)
                  : 1.0;
      const double maneuver = from + frac * (to - from);
      filtered = pole * filtered + gain * noise(rng);
      u(row, static_cast<Eigen::Index>(k)) =
          amplitude * (maneuver + 0.5 * filtered);
      ++seg_pos;
    }
  }
  // Zero-mean per channel, so that with epsilon = 0 the normalized data stay
  // linear (the interconnection has no bias terms).
  u.colwise() -= u.rowwise().mean();
  return u;
}

}  // namespace

BenchmarkSystem BenchmarkSystem::Default(double epsilon) {
  if (!(epsilon >= 0.0)) throw ConfigError("benchmark epsilon must be >= 0");
  BenchmarkSystem s;
  // Block upper-triangular with two lightly damped modes of modulus 0.95.
  s.a0 = Matrix::Zero(4, 4);
  s.a0.block(0, 0, 2, 2) = ScaledRotation(0.95, 0.2);
  s.a0.block(2, 2, 2, 2) = ScaledRotation(0.95, 0.5);
  s.a0.block(0, 2, 2, 2) << 0.2, 0.0, 0.0, 0.2;
  s.b0.resize(4, 2);
  s.b0 << 0.3, 0.0,  //
      0.0, 0.1,      //
      0.1, 0.2,      //
      0.0, 0.3;
  s.c0.resize(2, 4);
  s.c0 << 1.0, 0.0, 0.5, 0.0,  //
      0.0, 0.5, 0.0, 1.0;
  s.w.resize(4, 4);
  s.w << 0.0, 1.0, 0.0, 0.5,  //
      -1.0, 0.0, 0.5, 0.0,    //
      0.5, 0.0, 0.0, 1.0,     //
      0.0, -0.5, -1.0, 0.0;
  s.epsilon = epsilon;
  return s;
}

Matrix BenchmarkSystem::Simulate(const Matrix& u) const {
  if (u.rows() != b0.cols()) throw ShapeError("benchmark: input width");
  Vector x = Vector::Zero(a0.rows());
  Matrix y(c0.rows(), u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    y.col(k) = c0 * x;
    const Vector wx = w * x;
    x = a0 * x + b0 * u.col(k) + epsilon * wx.array().tanh().matrix();
  }
  return y;
}

SequenceDataset SyntheticBenchmark(const SyntheticProfile& profile) {
  if (profile.recordings == 0 || profile.duration == 0) {
    throw ConfigError("synthetic profile needs recordings and duration > 0");
  }
  if (!(profile.amplitude > 0.0)) {
    throw ConfigError("synthetic amplitude must be > 0");
  }
  const BenchmarkSystem sys = BenchmarkSystem::Default(profile.epsilon);
  std::mt19937_64 rng(profile.ood ? profile.seed ^ kOodStream : profile.seed);
  const double amplitude = profile.amplitude * (profile.ood ? 2.0 : 1.0);

  SequenceDataset ds;
  ds.input_names = {"u1", "u2"};
  ds.output_names = {"y1", "y2"};
  for (std::size_t r = 0; r < profile.recordings; ++r) {
    Recording rec;
    rec.u = Excitation(2, profile.duration, amplitude, rng);
    rec.y = sys.Simulate(rec.u);
    rec.sample_period = 1.0;
    rec.source = std::string(profile.ood ? "synthetic-ood:" : "synthetic:") +
                 std::to_string(r);
    ds.recordings.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace rrnn
