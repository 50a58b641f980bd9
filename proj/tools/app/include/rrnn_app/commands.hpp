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

#ifndef RRNN_APP_COMMANDS_HPP_
#define RRNN_APP_COMMANDS_HPP_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rrnn/constraints.hpp"
#include "rrnn/data.hpp"
#include "rrnn/serialization.hpp"
#include "rrnn/trainer.hpp"
#include "rrnn_app/config.hpp"

namespace rrnn::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,  // usage or configuration error
  kExitData = 2,
  kExitCertification = 3,  // feasibility or certification failure
  kExitStopped = 4,        // training stopped by the line search
};

// Maps an exception escaping a command to its exit code.
int ExitCodeFor(const std::exception& e);

struct LoadedData {
  RawSplits raw;
  std::optional<SequenceDataset> ood;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
};

// Raw (unnormalized) splits for the configured source. The synthetic source
// also produces the out-of-distribution set.
LoadedData LoadData(const RunConfig& config);

// "train", "val", "test" or "ood"; throws ConfigError otherwise.
const SequenceDataset& SplitByName(const LoadedData& data,
                                   std::string_view name);

void CmdGenerate(const RunConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& out);

struct TrainRun {
  TrainResult result;
  std::vector<std::string> warnings;
};

TrainRun RunTraining(const RunConfig& config, const LoadedData& data,
                     const EpochCallback& on_epoch = {});

// Writes config.json, train_log.jsonl and checkpoint.json to the output
// directory. Returns kExitStopped if the line search stopped training.
int CmdTrain(const RunConfig& config, std::ostream& out);

void CmdEvaluate(const RunConfig& config, const std::filesystem::path& ckpt,
                 std::string_view split, std::size_t horizon,
                 const std::filesystem::path& out_prefix, std::ostream& out);

struct GainSearchRequest {
  std::string split = "val";
  GainMode mode = GainMode::kGain;
  std::optional<std::size_t> steps;
  std::optional<double> learning_rate;
  bool adam = false;
};

GainReport RunGainSearch(const RunConfig& config, const TrainedModel& model,
                         const LoadedData& data, const GainSearchRequest& req);

void CmdGainSearch(const RunConfig& config, const std::filesystem::path& ckpt,
                   const GainSearchRequest& req,
                   const std::filesystem::path& out_path, std::ostream& out);

struct CertifyOptions {
  std::size_t sequences = 100;
  std::size_t length = 200;
  std::uint64_t seed = 0;
};

struct MarginCheck {
  double margin = 0.0;
  bool negative_definite = false;
};

struct CertificationReport {
  std::string kind;
  double gamma_sq = 0.0;
  std::size_t dim = 0;
  double lambda_max = 0.0;
  bool negative_definite = false;  // at margin 0
  std::vector<MarginCheck> margin_sweep;
  std::string diagnosis;
  std::size_t sequences = 0;
  std::size_t length = 0;
  std::size_t dissipation_failures = 0;
  std::size_t incremental_failures = 0;
  double worst_bound_slack = 0.0;
  double worst_incremental_bound_slack = 0.0;
  double worst_step_slack = 0.0;

  bool passed() const {
    return negative_definite && dissipation_failures == 0 &&
           incremental_failures == 0;
  }
};

CertificationReport Certify(const TildeParams& p,
                            const CertifyOptions& options);
Json ToJson(const CertificationReport& r);

// Throws ConfigError for unconstrained checkpoints. Returns kExitOk iff every
// check passes, kExitCertification otherwise.
int CmdCertify(const std::filesystem::path& ckpt, const CertifyOptions& options,
               const std::filesystem::path& out_path, std::ostream& out);

struct CompareRequest {
  // "name=path" or a bare path (named after its directory).
  std::vector<std::string> checkpoints;
  std::string split = "val";
  bool with_gain = true;
  std::filesystem::path out_csv = "compare.csv";
  std::optional<std::filesystem::path> out_json;
  std::optional<std::filesystem::path> plot_data;
};

void CmdCompare(const RunConfig& config, const CompareRequest& req,
                std::ostream& out);

// Expands config.grid into sequential runs under output_dir and writes a
// leaderboard sorted by validation mean RMSE.
void CmdGrid(const RunConfig& config, std::ostream& out);

}  // namespace rrnn::app

#endif  // RRNN_APP_COMMANDS_HPP_
