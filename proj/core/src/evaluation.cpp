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

#include "rrnn/evaluation.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rrnn/adam.hpp"
#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

constexpr int kCsvFormatVersion = 1;

struct RatioTerms {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio() const { return numerator / denominator; }
};

// The perturbed quantity in the denominator: u + theta for the plain gain,
// theta for the incremental gain.
const Matrix& DenominatorSignal(GainMode mode, const Matrix& u_pert,
                                const Matrix& theta) {
  return mode == GainMode::kGain ? u_pert : theta;
}

Matrix OutputDeviation(GainMode mode, const Matrix& y_pert,
                       const Matrix& y_ref) {
  return mode == GainMode::kGain ? y_pert : Matrix(y_pert - y_ref);
}

SequenceGain Ascend(const Predictor& model, const GainSequence& seq,
                    const GainSearchOptions& options, std::size_t index,
                    Matrix* best_theta) {
  SequenceGain out;
  const Matrix& u = seq.u;
  Matrix theta = Matrix::Zero(u.rows(), u.cols());
  if (options.mode == GainMode::kIncremental) {
    std::seed_seq sseq{static_cast<std::uint64_t>(options.seed),
                       static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> noise(0.0, options.init_noise);
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
      for (Eigen::Index j = 0; j < theta.cols(); ++j) theta(i, j) = noise(rng);
    }
  }
  const Matrix y_ref = options.mode == GainMode::kIncremental
                           ? model.Predict(seq.x0, u)
                           : Matrix();
  const double radius = options.cap_factor * u.norm();
  AdamState adam(static_cast<std::size_t>(theta.size()));

  *best_theta = theta;
  out.best = -std::numeric_limits<double>::infinity();
  out.trace.reserve(options.steps + 1);
  for (std::size_t step = 0; step <= options.steps; ++step) {
    const Matrix u_pert = u + theta;
    const Matrix& pert = DenominatorSignal(options.mode, u_pert, theta);
    RatioTerms terms;
    terms.denominator = pert.squaredNorm();
    if (!(terms.denominator > 0.0)) {
      out.failed = true;
      out.failure = "zero perturbed input energy at step " + std::to_string(step);
      break;
    }
    const bool last = step == options.steps;
    Predictor::Pass pass = model.ForwardBackward(
        seq.x0, u_pert,
        [&](const Matrix& y) -> Matrix {
          return 2.0 * OutputDeviation(options.mode, y, y_ref);
        },
        /*want_param_grad=*/false);
    terms.numerator = OutputDeviation(options.mode, pass.y, y_ref).squaredNorm();
    const double ratio = terms.ratio();
    if (!std::isfinite(ratio)) {
      out.failed = true;
      out.failure = "ratio diverged at step " + std::to_string(step);
      break;
    }
    out.trace.push_back(ratio);
    if (ratio > out.best) {
      out.best = ratio;
      out.best_step = step;
      out.perturbed_input_energy = terms.denominator;
      *best_theta = theta;
    }
    if (last) break;

    const Matrix grad =
        pass.input_grad / terms.denominator -
        (2.0 * terms.numerator / (terms.denominator * terms.denominator)) *
            pert;
    if (!grad.allFinite()) {
      out.failed = true;
      out.failure = "gradient diverged at step " + std::to_string(step);
      break;
    }
    if (options.method == AscentMethod::kPlain) {
      theta += options.learning_rate * grad;
    } else {
      const Vector flat = Eigen::Map<const Vector>(theta.data(), theta.size());
      const Vector neg = -Eigen::Map<const Vector>(grad.data(), grad.size());
      const Vector next = AdamStep(adam, flat, neg, options.learning_rate);
      theta = Eigen::Map<const Matrix>(next.data(), theta.rows(), theta.cols());
    }
    if (radius > 0.0) {
      const double norm = theta.norm();
      if (norm > radius) {
        theta *= radius / norm;
        out.cap_hit = true;
      }
    }
  }
  if (out.trace.empty()) out.best = 0.0;
  return out;
}

std::string OptionalCell(const std::optional<double>& v) {
  return v ? FormatReal(*v) : std::string();
}

}  // namespace

MetricsReport RmseFromPairs(const std::vector<Matrix>& truth,
                            const std::vector<Matrix>& prediction) {
  if (truth.size() != prediction.size()) {
    throw ShapeError("rmse: truth and prediction counts differ");
  }
  if (truth.empty()) throw DataError("rmse: no sequences");
  const Eigen::Index n_y = truth.front().rows();
  Vector sum = Vector::Zero(n_y);
  double count = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].rows() != n_y || prediction[i].rows() != n_y ||
        truth[i].cols() != prediction[i].cols()) {
      throw ShapeError("rmse: sequence shapes differ");
    }
    sum += (prediction[i] - truth[i]).array().square().rowwise().sum().matrix();
    count += static_cast<double>(truth[i].cols());
  }
  if (count == 0.0) throw DataError("rmse: sequences are empty");
  MetricsReport r;
  r.rmse = (sum / count).cwiseSqrt();
  r.mean_rmse = r.rmse.mean();
  r.sequence_count = truth.size();
  return r;
}

std::vector<EvalSequence> EvaluationSequences(
    const TrainedModel& model, const SequenceDataset& split,
    std::size_t horizon, std::vector<std::string>* warnings) {
  if (horizon == 0) throw ConfigError("evaluation horizon must be > 0");
  const auto ti = static_cast<Eigen::Index>(model.t_init);
  const auto n_u = static_cast<Eigen::Index>(split.n_u());
  const auto n_y = static_cast<Eigen::Index>(split.n_y());
  std::vector<EvalSequence> out;
  for (std::size_t r = 0; r < split.recordings.size(); ++r) {
    const Recording& rec = split.recordings[r];
    const auto len = static_cast<Eigen::Index>(rec.length());
    if (len < ti + 2) {
      if (warnings) {
        warnings->push_back("recording " + std::to_string(r) +
                            " too short for warmup plus one step; skipped");
      }
      continue;
    }
    const Eigen::Index available = len - ti - 1;
    Eigen::Index h = static_cast<Eigen::Index>(horizon);
    if (h > available) {
      if (warnings) {
        warnings->push_back("recording " + std::to_string(r) +
                            ": horizon " + std::to_string(horizon) +
                            " truncated to " + std::to_string(available));
      }
      h = available;
    }
    Matrix warmup(n_u + n_y, ti);
    warmup.topRows(n_u) = rec.u.middleCols(1, ti);
    warmup.bottomRows(n_y) = rec.y.middleCols(0, ti);
    EvalSequence s;
    s.x0 = model.InitialState(warmup).x0;
    s.u = rec.u.middleCols(ti + 1, h);
    s.y = rec.y.middleCols(ti + 1, h);
    s.recording = r;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EvalSequence> WindowedSequences(const TrainedModel& model,
                                            const SequenceDataset& split,
                                            std::size_t horizon,
                                            std::size_t stride) {
  std::vector<EvalSequence> out;
  for (Window& w : MakeWindows(split, model.t_init, horizon, stride)) {
    EvalSequence s;
    s.x0 = model.InitialState(w.warmup).x0;
    s.u = std::move(w.u);
    s.y = std::move(w.y);
    s.recording = w.recording;
    s.start = w.start;
    out.push_back(std::move(s));
  }
  return out;
}

MetricsReport Rmse(const TrainedModel& model, const SequenceDataset& split,
                   std::string_view split_name, std::size_t horizon) {
  if (split.n_u() != model.predictor.n_u() ||
      split.n_y() != model.predictor.n_y()) {
    throw DataError("evaluate: model and data channel counts differ");
  }
  std::vector<std::string> warnings;
  const auto seqs = EvaluationSequences(model, split, horizon, &warnings);
  if (seqs.empty()) throw DataError("evaluate: no usable recordings");
  std::vector<Matrix> truth, prediction;
  for (const EvalSequence& s : seqs) {
    truth.push_back(model.normalization.DenormalizeOutputs(s.y));
    prediction.push_back(model.normalization.DenormalizeOutputs(
        model.predictor.Predict(s.x0, s.u)));
  }
  MetricsReport r = RmseFromPairs(truth, prediction);
  r.split = std::string(split_name);
  r.channels = split.output_names;
  r.horizon = horizon;
  r.warnings = std::move(warnings);
  return r;
}

std::string_view GainModeName(GainMode mode) {
  return mode == GainMode::kGain ? "gain" : "incremental";
}

GainMode ParseGainMode(std::string_view name) {
  if (name == "gain") return GainMode::kGain;
  if (name == "incremental") return GainMode::kIncremental;
  throw ConfigError("unknown gain mode '" + std::string(name) +
                    "' (expected gain or incremental)");
}

GainSearchOptions GainSearchOptions::Defaults(GainMode mode) {
  GainSearchOptions o;
  o.mode = mode;
  o.steps = mode == GainMode::kGain ? 2000 : 1000;
  return o;
}

void GainSearchOptions::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("gain search lr must be > 0");
  if (!(cap_factor > 0.0)) throw ConfigError("cap_factor must be > 0");
  if (mode == GainMode::kIncremental && !(init_noise > 0.0)) {
    throw ConfigError("incremental search needs init_noise > 0");
  }
}

GainReport WorstGain(const Predictor& model,
                     const std::vector<GainSequence>& sequences,
                     const GainSearchOptions& options) {
  options.Validate();
  GainReport report;
  report.mode = options.mode;
  report.steps = options.steps;
  report.learning_rate = options.learning_rate;
  report.method = options.method;
  report.cap_factor = options.cap_factor;
  std::size_t capped = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const GainSequence& seq = sequences[i];
    if (static_cast<std::size_t>(seq.u.rows()) != model.n_u()) {
      throw ShapeError("gain search: input width mismatch");
    }
    Matrix best_theta;
    SequenceGain sg = Ascend(model, seq, options, i, &best_theta);
    if (sg.failed) {
      ++report.failures;
    } else if (!report.witness || sg.best > report.max_gain) {
      report.max_gain = sg.best;
      report.witness = GainWitness{i, seq.x0, seq.u, std::move(best_theta)};
    }
    if (sg.cap_hit) ++capped;
    report.sequences.push_back(std::move(sg));
  }
  std::ostringstream note;
  note << "perturbation norm capped at " << FormatReal(options.cap_factor)
       << "x the input norm; cap reached on " << capped << " of "
       << sequences.size() << " sequences";
  report.cap_note = note.str();
  return report;
}

GainReport WorstGain(const TrainedModel& model, const SequenceDataset& split,
                     const GainSearchOptions& options, std::size_t horizon,
                     std::size_t stride) {
  std::vector<GainSequence> seqs;
  for (EvalSequence& s : WindowedSequences(model, split, horizon, stride)) {
    seqs.push_back(GainSequence{std::move(s.x0), std::move(s.u)});
  }
  if (seqs.empty()) throw DataError("gain search: no usable windows");
  return WorstGain(model.predictor, seqs, options);
}

double ReplayGain(const Predictor& model, GainMode mode, const Vector& x0,
                  const Matrix& u, const Matrix& perturbation) {
  const Matrix u_pert = u + perturbation;
  const Matrix y_pert = model.Predict(x0, u_pert);
  if (mode == GainMode::kGain) {
    return y_pert.squaredNorm() / u_pert.squaredNorm();
  }
  const Matrix y_ref = model.Predict(x0, u);
  return (y_pert - y_ref).squaredNorm() / perturbation.squaredNorm();
}

double InitialStateOffset(const Predictor& model, const Vector& x0) {
  if (!UsesInterconnection(model.kind())) return 0.0;
  return x0.dot(model.tilde().x * x0);
}

std::string ComparisonTable::ToCsv() const {
  std::ostringstream out;
  out << "format_version,model";
  for (const auto& c : channels) out << ",rmse_" << c;
  out << ",mean_rmse,gamma_sq_star,gamma_sq_inc_star,configured_gamma_sq\n";
  for (const ComparisonRow& r : rows) {
    out << kCsvFormatVersion << ',' << r.name;
    for (Eigen::Index i = 0; i < r.rmse.size(); ++i) {
      out << ',' << FormatReal(r.rmse(i));
    }
    out << ',' << FormatReal(r.mean_rmse) << ',' << OptionalCell(r.gain) << ','
        << OptionalCell(r.incremental_gain) << ','
        << OptionalCell(r.configured_gamma_sq) << '\n';
  }
  return out.str();
}

std::string ComparisonTable::PlotDataCsv() const {
  std::ostringstream out;
  out << "format_version,model,gamma_sq_star,gamma_sq_inc_star,"
         "configured_gamma_sq,mean_rmse\n";
  for (const ComparisonRow& r : rows) {
    out << kCsvFormatVersion << ',' << r.name << ',' << OptionalCell(r.gain)
        << ',' << OptionalCell(r.incremental_gain) << ','
        << OptionalCell(r.configured_gamma_sq) << ','
        << FormatReal(r.mean_rmse) << '\n';
  }
  return out.str();
}

ComparisonTable CompareModels(const std::vector<ModelSummary>& summaries) {
  ComparisonTable table;
  if (summaries.empty()) return table;
  const MetricsReport& first = summaries.front().metrics;
  table.split = first.split;
  table.horizon = first.horizon;
  table.channels = first.channels;
  for (const ModelSummary& s : summaries) {
    const MetricsReport& m = s.metrics;
    if (m.split != first.split || m.horizon != first.horizon ||
        m.channels != first.channels) {
      throw DataError("compare: '" + s.name +
                      "' was evaluated on a different split, horizon or "
                      "channel set");
    }
    ComparisonRow row;
    row.name = s.name;
    row.rmse = m.rmse;
    row.mean_rmse = m.mean_rmse;
    if (s.gain) row.gain = s.gain->max_gain;
    if (s.incremental_gain) row.incremental_gain = s.incremental_gain->max_gain;
    row.configured_gamma_sq = s.configured_gamma_sq;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace rrnn
