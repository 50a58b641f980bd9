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

#include "rrnn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    out.push_back(Trim(line.substr(begin, comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::string Where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + ":" + std::to_string(row) + ": ";
}

double ParseCell(std::string_view cell, const std::filesystem::path& path,
                 std::size_t row, std::string_view column) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw DataError(Where(path, row) + "cannot parse '" + std::string(cell) +
                    "' in column '" + std::string(column) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(Where(path, row) + "non-finite value in column '" +
                    std::string(column) + "'");
  }
  return value;
}

Recording ToRecording(const std::vector<std::vector<double>>& rows,
                      std::size_t n_u, std::size_t n_y, double period,
                      std::string source) {
  const auto t = static_cast<Eigen::Index>(rows.size());
  Recording r;
  r.u.resize(static_cast<Eigen::Index>(n_u), t);
  r.y.resize(static_cast<Eigen::Index>(n_y), t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < n_u; ++i) {
      r.u(static_cast<Eigen::Index>(i), k) = row[i];
    }
    for (std::size_t i = 0; i < n_y; ++i) {
      r.y(static_cast<Eigen::Index>(i), k) = row[n_u + i];
    }
  }
  r.sample_period = period;
  r.source = std::move(source);
  return r;
}

std::vector<Recording> ReadFile(const std::filesystem::path& path,
                                const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::string line;
  if (!std::getline(in, line) || Trim(line).empty()) {
    throw DataError(path.string() + ": empty file");
  }
  const auto header = SplitFields(line);
  auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  for (const auto* group : {&schema.inputs, &schema.outputs}) {
    for (const std::string& name : *group) {
      const auto col = find_column(name);
      if (!col) {
        throw DataError(Where(path, 1) + "missing column '" + name + "'");
      }
      columns.push_back(*col);
      names.push_back(name);
    }
  }
  const std::optional<std::size_t> rec_col =
      schema.recording_column.empty() ? std::nullopt
                                      : find_column(schema.recording_column);

  std::vector<Recording> out;
  std::vector<std::vector<double>> rows;
  std::string current_id;
  auto flush = [&] {
    if (rows.empty()) return;
    std::string source = path.string();
    if (rec_col) source += "#" + current_id;
    out.push_back(ToRecording(rows, schema.inputs.size(),
                              schema.outputs.size(), schema.sample_period,
                              std::move(source)));
    rows.clear();
  };

  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      throw DataError(Where(path, row_number) + "expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    if (rec_col) {
      const std::string id(fields[*rec_col]);
      if (!rows.empty() && id != current_id) flush();
      current_id = id;
    }
    std::vector<double> values(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      values[i] = ParseCell(fields[columns[i]], path, row_number, names[i]);
    }
    rows.push_back(std::move(values));
  }
  flush();
  if (out.empty()) throw DataError(path.string() + ": no data rows");
  return out;
}

ChannelStats Stats(const std::vector<const Matrix*>& blocks, Eigen::Index n) {
  ChannelStats s{Vector::Zero(n), Vector::Zero(n)};
  double count = 0.0;
  for (const Matrix* m : blocks) {
    s.mean += m->rowwise().sum();
    count += static_cast<double>(m->cols());
  }
  if (count == 0.0) throw DataError("normalization: training split is empty");
  s.mean /= count;
  for (const Matrix* m : blocks) {
    s.std += (m->colwise() - s.mean).array().square().rowwise().sum().matrix();
  }
  s.std = (s.std / count).cwiseSqrt().cwiseMax(Normalization::kStdFloor);
  return s;
}

Matrix Standardize(const Matrix& m, const ChannelStats& s) {
  if (m.rows() != s.mean.size()) {
    throw ShapeError("normalization: channel count mismatch");
  }
  return (m.colwise() - s.mean).array().colwise() / s.std.array();
}

Matrix Destandardize(const Matrix& m, const ChannelStats& s) {
  if (m.rows() != s.mean.size()) {
    throw ShapeError("normalization: channel count mismatch");
  }
  return (m.array().colwise() * s.std.array()).matrix().colwise() + s.mean;
}

}  // namespace

Matrix Normalization::NormalizeInputs(const Matrix& u) const {
  return Standardize(u, input);
}
Matrix Normalization::NormalizeOutputs(const Matrix& y) const {
  return Standardize(y, output);
}
Matrix Normalization::DenormalizeInputs(const Matrix& u) const {
  return Destandardize(u, input);
}
Matrix Normalization::DenormalizeOutputs(const Matrix& y) const {
  return Destandardize(y, output);
}

Normalization Normalization::Identity(std::size_t n_u, std::size_t n_y) {
  const auto nu = static_cast<Eigen::Index>(n_u);
  const auto ny = static_cast<Eigen::Index>(n_y);
  return Normalization{{Vector::Zero(nu), Vector::Ones(nu)},
                       {Vector::Zero(ny), Vector::Ones(ny)}};
}

std::size_t SequenceDataset::TotalSamples() const {
  std::size_t n = 0;
  for (const Recording& r : recordings) n += r.length();
  return n;
}

SequenceDataset LoadCsv(const std::vector<std::filesystem::path>& paths,
                        const CsvSchema& schema) {
  if (schema.inputs.empty() || schema.outputs.empty()) {
    throw ConfigError("csv schema needs at least one input and one output");
  }
  if (!(schema.sample_period > 0.0)) {
    throw ConfigError("csv schema: sample_period must be > 0");
  }
  SequenceDataset ds{schema.inputs, schema.outputs, {}};
  for (const auto& path : paths) {
    for (Recording& r : ReadFile(path, schema)) {
      ds.recordings.push_back(std::move(r));
    }
  }
  return ds;
}

void WriteCsv(const SequenceDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << "recording";
  for (const auto& n : ds.input_names) out << ',' << n;
  for (const auto& n : ds.output_names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < ds.recordings.size(); ++r) {
    const Recording& rec = ds.recordings[r];
    for (Eigen::Index k = 0; k < rec.u.cols(); ++k) {
      out << r;
      for (Eigen::Index i = 0; i < rec.u.rows(); ++i) {
        out << ',' << FormatReal(rec.u(i, k));
      }
      for (Eigen::Index i = 0; i < rec.y.rows(); ++i) {
        out << ',' << FormatReal(rec.y(i, k));
      }
      out << '\n';
    }
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

Normalization ComputeNormalization(const SequenceDataset& train) {
  std::vector<const Matrix*> us, ys;
  for (const Recording& r : train.recordings) {
    us.push_back(&r.u);
    ys.push_back(&r.y);
  }
  return Normalization{
      Stats(us, static_cast<Eigen::Index>(train.n_u())),
      Stats(ys, static_cast<Eigen::Index>(train.n_y()))};
}

SequenceDataset ApplyNormalization(const SequenceDataset& ds,
                                   const Normalization& norm) {
  SequenceDataset out = ds;
  for (Recording& r : out.recordings) {
    r.u = norm.NormalizeInputs(r.u);
    r.y = norm.NormalizeOutputs(r.y);
  }
  return out;
}

RawSplits SplitRecordings(const SequenceDataset& ds, const SplitRatios& ratios,
                          std::uint64_t seed) {
  if (ratios.train < 0.0 || ratios.val < 0.0 || ratios.test < 0.0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be nonnegative and sum to 1");
  }
  const std::size_t n = ds.recordings.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(ratios.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(
      std::llround(ratios.val * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw DataError("split: " + std::to_string(n) +
                    " recordings cannot populate train/val/test");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  RawSplits out;
  for (SequenceDataset* s : {&out.train, &out.val, &out.test}) {
    s->input_names = ds.input_names;
    s->output_names = ds.output_names;
  }
  for (std::size_t i = 0; i < n; ++i) {
    SequenceDataset& dst = i < n_train           ? out.train
                           : i < n_train + n_val ? out.val
                                                 : out.test;
    dst.recordings.push_back(ds.recordings[order[i]]);
  }
  return out;
}

DataSplits SplitAndNormalize(const SequenceDataset& ds,
                             const SplitRatios& ratios, std::uint64_t seed) {
  RawSplits raw = SplitRecordings(ds, ratios, seed);
  DataSplits out;
  out.normalization = ComputeNormalization(raw.train);
  out.train = ApplyNormalization(raw.train, out.normalization);
  out.val = ApplyNormalization(raw.val, out.normalization);
  out.test = ApplyNormalization(raw.test, out.normalization);
  return out;
}

std::size_t WindowCount(std::size_t length, std::size_t t_init,
                        std::size_t t_pred, std::size_t stride) {
  if (stride == 0) throw ConfigError("window stride must be > 0");
  if (length < t_init + t_pred + 1) return 0;
  return (length - t_init - t_pred - 1) / stride + 1;
}

std::vector<Window> MakeWindows(const SequenceDataset& split,
                                std::size_t t_init, std::size_t t_pred,
                                std::size_t stride,
                                std::vector<std::string>* warnings) {
  if (t_init == 0 || t_pred == 0) {
    throw ConfigError("window lengths must be > 0");
  }
  const auto n_u = static_cast<Eigen::Index>(split.n_u());
  const auto n_y = static_cast<Eigen::Index>(split.n_y());
  const auto ti = static_cast<Eigen::Index>(t_init);
  const auto tp = static_cast<Eigen::Index>(t_pred);
  std::vector<Window> out;
  for (std::size_t r = 0; r < split.recordings.size(); ++r) {
    const Recording& rec = split.recordings[r];
    const std::size_t count = WindowCount(rec.length(), t_init, t_pred, stride);
    if (count == 0) {
      if (warnings) {
        warnings->push_back("recording " + std::to_string(r) + " (" +
                            rec.source + ") has " +
                            std::to_string(rec.length()) +
                            " samples, too short for one window; skipped");
      }
      continue;
    }
    for (std::size_t w = 0; w < count; ++w) {
      const auto s = static_cast<Eigen::Index>(w * stride);
      Window win;
      win.warmup.resize(n_u + n_y, ti);
      win.warmup.topRows(n_u) = rec.u.middleCols(s + 1, ti);
      win.warmup.bottomRows(n_y) = rec.y.middleCols(s, ti);
      win.warmup_y = rec.y.middleCols(s + 1, ti);
      win.u = rec.u.middleCols(s + ti + 1, tp);
      win.y = rec.y.middleCols(s + ti + 1, tp);
      win.recording = r;
      win.start = static_cast<std::size_t>(s);
      out.push_back(std::move(win));
    }
  }
  return out;
}

}  // namespace rrnn
