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

#ifndef RRNN_APP_CONFIG_HPP_
#define RRNN_APP_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rrnn/data.hpp"
#include "rrnn/evaluation.hpp"
#include "rrnn/predictor.hpp"
#include "rrnn/serialization.hpp"
#include "rrnn/trainer.hpp"

namespace rrnn::app {

enum class DataSource {
  kSynthetic,  // generated in memory from the synthetic profile
  kDirectory,  // train/val/test/ood CSVs written by `generate`
  kCsv,        // arbitrary CSV files split by recording
};

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  SyntheticProfile synthetic;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> csv_paths;
  CsvSchema schema;
  SplitRatios split;
  std::size_t window_stride = 50;

  bool operator==(const DataConfig&) const = default;
};

struct EvalConfig {
  std::size_t horizon = kDefaultEvalHorizon;
  std::size_t gain_horizon = 200;
  std::size_t gain_stride = 200;
  std::size_t gain_steps = 2000;
  std::size_t incremental_steps = 1000;
  double gain_learning_rate = 0.001;
  AscentMethod ascent = AscentMethod::kPlain;
  double cap_factor = 10.0;
  double init_noise = 1e-3;

  GainSearchOptions GainOptions(GainMode mode, std::uint64_t seed) const;
  bool operator==(const EvalConfig&) const = default;
};

// Lists expanded by the grid command into a cartesian product of runs.
// Empty lists leave the base value untouched.
struct GridConfig {
  std::vector<std::size_t> n_x;
  std::vector<std::size_t> n_z;
  std::vector<double> gamma_sq;
  std::vector<double> learning_rate;

  bool empty() const {
    return n_x.empty() && n_z.empty() && gamma_sq.empty() &&
           learning_rate.empty();
  }
  bool operator==(const GridConfig&) const = default;
};

struct RunConfig {
  // Defaults fit the built-in synthetic benchmark.
  ModelSpec model{ModelKind::kCrnn, Dims{2, 2, 8, 8}};
  TrainConfig train;
  DataConfig data;
  EvalConfig eval;
  GridConfig grid;
  std::filesystem::path output_dir = "run";
  // Single seed for data generation, splitting, initialization and training.
  std::uint64_t seed = 0;

  // Throws ConfigError. With check_paths, referenced input files must exist.
  void Validate(bool check_paths) const;
  // Copies `seed` into train.seed and data.synthetic.seed.
  void SyncSeeds();
  bool operator==(const RunConfig&) const = default;
};

Json ToJson(const RunConfig& config);
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
RunConfig RunConfigFromJson(const Json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace rrnn::app

#endif  // RRNN_APP_CONFIG_HPP_
