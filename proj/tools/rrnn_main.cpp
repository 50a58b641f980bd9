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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rrnn/errors.hpp"
#include "rrnn_app/commands.hpp"
#include "rrnn_app/config.hpp"

namespace {

using rrnn::app::RunConfig;

}  // namespace

int main(int argc, char** argv) {
  namespace app = rrnn::app;
  CLI::App cli{"Robust recurrent network identification toolkit", "rrnn"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string checkpoint;
  std::string out;
  std::string split;

  auto* generate = cli.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();
  generate->add_option("-o,--out", out, "output directory "
                                        "(default <output_dir>/data)");

  auto* train = cli.add_subcommand("train", "train initializer and predictor");
  train->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();

  std::size_t horizon = 0;
  auto* evaluate = cli.add_subcommand("evaluate", "per-channel RMSE");
  evaluate->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();
  evaluate->add_option("-k,--checkpoint", checkpoint, "checkpoint JSON")
      ->required();
  evaluate->add_option("-s,--split", split, "train, val, test or ood")
      ->default_val("test");
  evaluate->add_option("--horizon", horizon,
                       "prediction horizon (default from config)");
  evaluate->add_option("-o,--out", out,
                       "output prefix (default <checkpoint dir>/metrics_<split>)");

  app::GainSearchRequest gain_req;
  std::string mode = "gain";
  std::optional<std::size_t> steps;
  std::optional<double> lr;
  auto* gain = cli.add_subcommand("gain-search", "empirical worst-case gain");
  gain->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();
  gain->add_option("-k,--checkpoint", checkpoint, "checkpoint JSON")
      ->required();
  gain->add_option("-s,--split", gain_req.split, "data split")
      ->default_val("val");
  gain->add_option("-m,--mode", mode, "gain or incremental")
      ->check(CLI::IsMember({"gain", "incremental"}))
      ->default_val("gain");
  gain->add_option("--steps", steps, "ascent steps (default 2000 / 1000)");
  gain->add_option("--lr", lr, "ascent step size (default 0.001)");
  gain->add_flag("--adam", gain_req.adam, "use Adam instead of plain ascent");
  gain->add_option("-o,--out", out,
                   "report path (default <checkpoint dir>/gain_<mode>.json)");

  app::CertifyOptions cert_opts;
  auto* certify = cli.add_subcommand("certify", "check a crnn certificate");
  certify->add_option("-k,--checkpoint", checkpoint, "checkpoint JSON")
      ->required();
  certify->add_option("--sequences", cert_opts.sequences,
                      "random sequences to verify")
      ->default_val(100);
  certify->add_option("--length", cert_opts.length, "sequence length")
      ->default_val(200);
  certify->add_option("--seed", cert_opts.seed, "sequence seed")
      ->default_val(0);
  certify->add_option("-o,--out", out,
                      "report path (default <checkpoint dir>/certificate.json)");

  app::CompareRequest cmp_req;
  std::string cmp_json, plot_data;
  bool no_gain = false;
  auto* compare = cli.add_subcommand("compare", "tabulate several checkpoints");
  compare->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();
  compare->add_option("-k,--checkpoint", cmp_req.checkpoints,
                      "checkpoint as name=path or path (repeatable)");
  compare->add_option("-s,--split", cmp_req.split, "data split")
      ->default_val("val");
  compare->add_flag("--no-gain", no_gain, "skip the gain searches");
  compare->add_option("-o,--out", cmp_req.out_csv, "table CSV")
      ->default_val("compare.csv");
  compare->add_option("--json", cmp_json, "also write the table as JSON");
  compare->add_option("--emit-plot-data", plot_data,
                      "write (gain, mean RMSE) pairs as CSV");

  auto* grid = cli.add_subcommand("grid", "sweep config lists, rank by RMSE");
  grid->add_option("-c,--config", config_path, "run config (JSON)")
      ->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? app::kExitOk : app::kExitUsage;
  }

  const std::filesystem::path ckpt_dir =
      std::filesystem::path(checkpoint).parent_path();
  try {
    if (certify->parsed()) {
      return app::CmdCertify(
          checkpoint, cert_opts,
          out.empty() ? ckpt_dir / "certificate.json" : std::filesystem::path(out),
          std::cout);
    }
    const RunConfig config = app::LoadRunConfig(config_path);
    if (generate->parsed()) {
      app::CmdGenerate(config,
                       out.empty() ? config.output_dir / "data"
                                   : std::filesystem::path(out),
                       std::cout);
    } else if (train->parsed()) {
      return app::CmdTrain(config, std::cout);
    } else if (evaluate->parsed()) {
      app::CmdEvaluate(config, checkpoint, split,
                       horizon > 0 ? horizon : config.eval.horizon,
                       out.empty() ? ckpt_dir / ("metrics_" + split)
                                   : std::filesystem::path(out),
                       std::cout);
    } else if (gain->parsed()) {
      gain_req.mode = rrnn::ParseGainMode(mode);
      gain_req.steps = steps;
      gain_req.learning_rate = lr;
      app::CmdGainSearch(config, checkpoint, gain_req,
                         out.empty() ? ckpt_dir / ("gain_" + mode + ".json")
                                     : std::filesystem::path(out),
                         std::cout);
    } else if (compare->parsed()) {
      cmp_req.with_gain = !no_gain;
      if (!cmp_json.empty()) cmp_req.out_json = cmp_json;
      if (!plot_data.empty()) cmp_req.plot_data = plot_data;
      app::CmdCompare(config, cmp_req, std::cout);
    } else if (grid->parsed()) {
      app::CmdGrid(config, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "rrnn: " << e.what() << "\n";
    return app::ExitCodeFor(e);
  }
  return app::kExitOk;
}
