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

#include "rrnn_app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "rrnn/errors.hpp"
#include "rrnn/evaluation.hpp"

namespace rrnn::app {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSplitNames[] = {"train", "val", "test", "ood"};

void RequireSameChannels(const TrainedModel& model,
                         const LoadedData& data) {
  if (model.input_names != data.input_names ||
      model.output_names != data.output_names) {
    throw DataError("checkpoint channels do not match the dataset schema");
  }
}

SequenceDataset NormalizedSplit(const TrainedModel& model,
                                const LoadedData& data,
                                std::string_view split) {
  RequireSameChannels(model, data);
  return ApplyNormalization(SplitByName(data, split), model.normalization);
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string BlockDiagnosis(const ConstraintMatrix& cm, std::size_t pivot) {
  for (std::size_t b = 0; b < 5; ++b) {
    const auto block = static_cast<LmiBlock>(b);
    const std::size_t off = cm.layout.Offset(block);
    if (pivot >= off && pivot < off + cm.layout.Size(block)) {
      return "first nonpositive pivot of -M at index " + std::to_string(pivot) +
             " (block " + std::string(BlockLayout::Name(block)) + ", row " +
             std::to_string(pivot - off) + ")";
    }
  }
  return "first nonpositive pivot of -M at index " + std::to_string(pivot);
}

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

struct NamedCheckpoint {
  std::string name;
  fs::path path;
};

NamedCheckpoint ParseNamedCheckpoint(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) {
    return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
  }
  const fs::path p(arg);
  const fs::path parent = p.parent_path().filename();
  return {parent.empty() ? p.stem().string() : parent.string(), p};
}

Json DatasetSummary(const SequenceDataset& ds) {
  return Json{{"recordings", ds.recordings.size()},
              {"samples", ds.TotalSamples()}};
}

std::string MetricsCsv(const MetricsReport& m) {
  std::ostringstream out;
  out << "format_version,split,horizon,sequence_count";
  for (const auto& c : m.channels) out << ",rmse_" << c;
  out << ",mean_rmse\n";
  out << kFormatVersion << ',' << m.split << ',' << m.horizon << ','
      << m.sequence_count;
  for (Eigen::Index i = 0; i < m.rmse.size(); ++i) {
    out << ',' << FormatReal(m.rmse(i));
  }
  out << ',' << FormatReal(m.mean_rmse) << '\n';
  return out.str();
}

// Runs training and writes the standard artifacts into config.output_dir.
TrainRun TrainAndSave(const RunConfig& config, const LoadedData& data) {
  EnsureDirectory(config.output_dir);
  WriteTextFile(config.output_dir / "config.json", Dump(ToJson(config)));
  const fs::path log_path = config.output_dir / "train_log.jsonl";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw DataError(log_path.string() + ": cannot open for writing");
  TrainRun run = RunTraining(config, data, [&](const EpochLog& entry) {
    log << ToJson(entry).dump() << '\n';
  });
  log.close();
  if (!log) throw DataError(log_path.string() + ": write failed");
  SaveCheckpoint(config.output_dir / "checkpoint.json", run.result.model,
                 run.result.status);
  return run;
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const DataError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitData;
  }
  if (dynamic_cast<const DefinitenessError*>(&e) ||
      dynamic_cast<const NumericError*>(&e)) {
    return kExitCertification;
  }
  return kExitUsage;
}

LoadedData LoadData(const RunConfig& config) {
  const DataConfig& dc = config.data;
  LoadedData out;
  switch (dc.source) {
    case DataSource::kSynthetic: {
      SyntheticProfile profile = dc.synthetic;
      profile.ood = false;
      const SequenceDataset ds = SyntheticBenchmark(profile);
      out.raw = SplitRecordings(ds, dc.split, config.seed);
      profile.ood = true;
      profile.recordings = out.raw.test.recordings.size();
      out.ood = SyntheticBenchmark(profile);
      break;
    }
    case DataSource::kDirectory: {
      const Json manifest = ReadJsonFile(dc.directory / "manifest.json");
      CsvSchema schema;
      try {
        schema.inputs = manifest.at("inputs").get<std::vector<std::string>>();
        schema.outputs = manifest.at("outputs").get<std::vector<std::string>>();
        schema.sample_period = manifest.at("sample_period").get<double>();
      } catch (const Json::exception& e) {
        throw DataError("manifest: " + std::string(e.what()));
      }
      auto load = [&](const char* name) {
        return LoadCsv({dc.directory / (std::string(name) + ".csv")}, schema);
      };
      out.raw = RawSplits{load("train"), load("val"), load("test")};
      if (fs::exists(dc.directory / "ood.csv")) out.ood = load("ood");
      break;
    }
    case DataSource::kCsv: {
      const SequenceDataset ds = LoadCsv(dc.csv_paths, dc.schema);
      out.raw = SplitRecordings(ds, dc.split, config.seed);
      break;
    }
  }
  out.input_names = out.raw.train.input_names;
  out.output_names = out.raw.train.output_names;
  return out;
}

const SequenceDataset& SplitByName(const LoadedData& data,
                                   std::string_view name) {
  if (name == "train") return data.raw.train;
  if (name == "val") return data.raw.val;
  if (name == "test") return data.raw.test;
  if (name == "ood") {
    if (!data.ood) throw ConfigError("this data source has no ood split");
    return *data.ood;
  }
  throw ConfigError("unknown split '" + std::string(name) +
                    "' (expected train, val, test or ood)");
}

void CmdGenerate(const RunConfig& config, const fs::path& out_dir,
                 std::ostream& out) {
  config.Validate(/*check_paths=*/false);
  if (config.data.source != DataSource::kSynthetic) {
    throw ConfigError("generate requires data.source = synthetic");
  }
  // Everything is computed before the first file is written.
  const LoadedData data = LoadData(config);
  const SyntheticProfile& p = config.data.synthetic;
  Json manifest{
      {"format_version", kFormatVersion},
      {"seed", config.seed},
      {"profile",
       {{"recordings", p.recordings},
        {"duration", p.duration},
        {"amplitude", p.amplitude},
        {"epsilon", p.epsilon},
        {"ood_amplitude_factor", 2.0}}},
      {"split",
       {{"train", config.data.split.train},
        {"val", config.data.split.val},
        {"test", config.data.split.test}}},
      {"inputs", data.input_names},
      {"outputs", data.output_names},
      {"sample_period", 1.0},
      {"files",
       {{"train", "train.csv"},
        {"val", "val.csv"},
        {"test", "test.csv"},
        {"ood", "ood.csv"}}},
      {"summary", Json::object()}};
  EnsureDirectory(out_dir);
  for (const char* name : kSplitNames) {
    const SequenceDataset& ds = SplitByName(data, name);
    WriteCsv(ds, out_dir / (std::string(name) + ".csv"));
    manifest["summary"][name] = DatasetSummary(ds);
  }
  WriteTextFile(out_dir / "manifest.json", Dump(manifest));
  out << "wrote train/val/test/ood CSVs and manifest.json to "
      << out_dir.string() << "\n";
}

TrainRun RunTraining(const RunConfig& config, const LoadedData& data,
                     const EpochCallback& on_epoch) {
  const Dims& d = config.model.dims;
  if (data.input_names.size() != d.n_u || data.output_names.size() != d.n_y) {
    throw DataError("dataset has " + std::to_string(data.input_names.size()) +
                    " inputs and " + std::to_string(data.output_names.size()) +
                    " outputs; config dims disagree");
  }
  std::vector<std::string> warnings;
  const Normalization norm = ComputeNormalization(data.raw.train);
  const SequenceDataset train = ApplyNormalization(data.raw.train, norm);
  TrainData td{MakeWindows(train, config.train.seq_len_init,
                           config.train.seq_len_pred,
                           config.data.window_stride, &warnings),
               norm, data.input_names, data.output_names};
  if (td.windows.empty()) {
    throw DataError("no training windows: recordings are too short");
  }
  return TrainRun{Train(config.model, td, config.train, on_epoch),
                  std::move(warnings)};
}

int CmdTrain(const RunConfig& config, std::ostream& out) {
  config.Validate(/*check_paths=*/true);
  const LoadedData data = LoadData(config);
  const TrainRun run = TrainAndSave(config, data);
  for (const auto& w : run.warnings) out << "warning: " << w << "\n";
  const TrainResult& r = run.result;
  out << "training " << StatusName(r.status) << " after " << r.accepted_steps
      << " accepted steps; checkpoint "
      << (config.output_dir / "checkpoint.json").string() << "\n";
  switch (r.status) {
    case TrainStatus::kCompleted:
      return kExitOk;
    case TrainStatus::kStoppedByLineSearch:
      return kExitStopped;
    case TrainStatus::kNumericFailure:
      return kExitCertification;
  }
  return kExitOk;
}

void CmdEvaluate(const RunConfig& config, const fs::path& ckpt,
                 std::string_view split, std::size_t horizon,
                 const fs::path& out_prefix, std::ostream& out) {
  config.Validate(/*check_paths=*/true);
  const TrainedModel model = LoadCheckpoint(ckpt).model;
  const LoadedData data = LoadData(config);
  const MetricsReport m =
      Rmse(model, NormalizedSplit(model, data, split), split, horizon);
  for (const auto& w : m.warnings) out << "warning: " << w << "\n";
  WriteTextFile(out_prefix.string() + ".json", Dump(ToJson(m)));
  WriteTextFile(out_prefix.string() + ".csv", MetricsCsv(m));
  out << split << " mean RMSE " << FormatReal(m.mean_rmse) << " over "
      << m.sequence_count << " sequences\n";
}

GainReport RunGainSearch(const RunConfig& config, const TrainedModel& model,
                         const LoadedData& data, const GainSearchRequest& req) {
  GainSearchOptions opts = config.eval.GainOptions(req.mode, config.seed);
  if (req.steps) opts.steps = *req.steps;
  if (req.learning_rate) opts.learning_rate = *req.learning_rate;
  if (req.adam) opts.method = AscentMethod::kAdam;
  return WorstGain(model, NormalizedSplit(model, data, req.split), opts,
                   config.eval.gain_horizon, config.eval.gain_stride);
}

void CmdGainSearch(const RunConfig& config, const fs::path& ckpt,
                   const GainSearchRequest& req, const fs::path& out_path,
                   std::ostream& out) {
  config.Validate(/*check_paths=*/true);
  const TrainedModel model = LoadCheckpoint(ckpt).model;
  const LoadedData data = LoadData(config);
  const GainReport report = RunGainSearch(config, model, data, req);
  WriteTextFile(out_path, Dump(ToJson(report)));
  out << GainModeName(req.mode) << " search: max ratio "
      << FormatReal(report.max_gain) << " over " << report.sequences.size()
      << " sequences (" << report.failures << " failed)";
  if (model.spec.kind == ModelKind::kCrnn) {
    out << "; configured gamma^2 " << FormatReal(model.spec.gamma_sq);
  }
  out << "\n";
}

CertificationReport Certify(const TildeParams& p,
                            const CertifyOptions& options) {
  const Dims dims = p.InferDims();
  const ConstraintMatrix cm = AssembleConstraintMatrix(p);
  CertificationReport r;
  r.kind = "crnn";
  r.gamma_sq = p.gamma_sq;
  r.dim = cm.layout.dim();
  r.lambda_max = MaxEigenvalue(cm);
  r.negative_definite = IsNegativeDefinite(cm.m, 0.0);
  for (double margin : {0.0, 1e-12, DefaultMargin(r.dim), TrainingMargin(dims),
                        1e-6, 1e-4}) {
    r.margin_sweep.push_back({margin, IsNegativeDefinite(cm.m, margin)});
  }
  if (!r.negative_definite) {
    const CholeskyResult chol = Cholesky(cm.m.NegatedShifted(0.0));
    r.diagnosis = "M is not negative definite: " +
                  BlockDiagnosis(cm, chol.failed_pivot) +
                  "; lambda_max = " + FormatReal(r.lambda_max);
  }

  r.sequences = options.sequences;
  r.length = options.length;
  std::mt19937_64 rng(options.seed);
  const auto n_u = static_cast<Eigen::Index>(dims.n_u);
  const auto len = static_cast<Eigen::Index>(options.length);
  r.worst_bound_slack = -std::numeric_limits<double>::infinity();
  r.worst_incremental_bound_slack = -std::numeric_limits<double>::infinity();
  r.worst_step_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < options.sequences; ++s) {
    const Vector x0 = Gaussian(static_cast<Eigen::Index>(dims.n_x), 1, rng);
    const Matrix u_a = Gaussian(n_u, len, rng);
    const Matrix u_b = Gaussian(n_u, len, rng);
    const DissipationReport plain = VerifyDissipation(p, x0, u_a);
    const DissipationReport inc =
        VerifyIncrementalDissipation(p, x0, u_a, u_b);
    if (!plain.passed()) ++r.dissipation_failures;
    if (!inc.passed()) ++r.incremental_failures;
    r.worst_bound_slack = std::max(r.worst_bound_slack, plain.bound_slack);
    r.worst_incremental_bound_slack =
        std::max(r.worst_incremental_bound_slack, inc.bound_slack);
    r.worst_step_slack = std::max(
        {r.worst_step_slack, plain.worst_slack, inc.worst_slack});
  }
  if (options.sequences == 0) {
    r.worst_bound_slack = r.worst_incremental_bound_slack =
        r.worst_step_slack = 0.0;
  }
  return r;
}

Json ToJson(const CertificationReport& r) {
  Json sweep = Json::array();
  for (const MarginCheck& m : r.margin_sweep) {
    sweep.push_back(
        {{"margin", m.margin}, {"negative_definite", m.negative_definite}});
  }
  return Json{{"format_version", kFormatVersion},
              {"kind", r.kind},
              {"gamma_sq", r.gamma_sq},
              {"dim", r.dim},
              {"lambda_max", r.lambda_max},
              {"negative_definite", r.negative_definite},
              {"margin_sweep", sweep},
              {"diagnosis", r.diagnosis},
              {"sequences", r.sequences},
              {"length", r.length},
              {"dissipation_failures", r.dissipation_failures},
              {"incremental_failures", r.incremental_failures},
              {"worst_bound_slack", r.worst_bound_slack},
              {"worst_incremental_bound_slack",
               r.worst_incremental_bound_slack},
              {"worst_step_slack", r.worst_step_slack},
              {"passed", r.passed()}};
}

int CmdCertify(const fs::path& ckpt, const CertifyOptions& options,
               const fs::path& out_path, std::ostream& out) {
  const Json doc = ReadJsonFile(ckpt);
  const std::string kind = doc.value("kind", std::string());
  if (kind != KindName(ModelKind::kCrnn)) {
    throw ConfigError("certify applies only to constrained (crnn) checkpoints;"
                      " '" + kind + "' models carry no certificate");
  }
  const TrainedModel model = CheckpointFromJson(doc).model;
  const CertificationReport r = Certify(model.predictor.tilde(), options);
  WriteTextFile(out_path, Dump(ToJson(r)));
  if (!r.diagnosis.empty()) out << r.diagnosis << "\n";
  out << "certificate " << (r.passed() ? "PASSED" : "FAILED")
      << ": gamma^2 " << FormatReal(r.gamma_sq) << ", lambda_max "
      << FormatReal(r.lambda_max) << ", " << r.dissipation_failures << "/"
      << r.sequences << " gain and " << r.incremental_failures << "/"
      << r.sequences << " incremental violations\n";
  return r.passed() ? kExitOk : kExitCertification;
}

void CmdCompare(const RunConfig& config, const CompareRequest& req,
                std::ostream& out) {
  config.Validate(/*check_paths=*/true);
  const LoadedData data = LoadData(config);
  std::vector<ModelSummary> summaries;
  for (const std::string& arg : req.checkpoints) {
    const NamedCheckpoint nc = ParseNamedCheckpoint(arg);
    const TrainedModel model = LoadCheckpoint(nc.path).model;
    ModelSummary s;
    s.name = nc.name;
    s.metrics = Rmse(model, NormalizedSplit(model, data, req.split), req.split,
                     config.eval.horizon);
    if (req.with_gain) {
      GainSearchRequest g{req.split, GainMode::kGain, {}, {}, false};
      s.gain = RunGainSearch(config, model, data, g);
      g.mode = GainMode::kIncremental;
      s.incremental_gain = RunGainSearch(config, model, data, g);
    }
    if (model.spec.kind == ModelKind::kCrnn) {
      s.configured_gamma_sq = model.spec.gamma_sq;
    }
    summaries.push_back(std::move(s));
  }
  const ComparisonTable table = CompareModels(summaries);
  WriteTextFile(req.out_csv, table.ToCsv());
  if (req.out_json) WriteTextFile(*req.out_json, Dump(ToJson(table)));
  if (req.plot_data) WriteTextFile(*req.plot_data, table.PlotDataCsv());
  out << "compared " << table.rows.size() << " models on split '" << req.split
      << "'; table written to " << req.out_csv.string() << "\n";
}

void CmdGrid(const RunConfig& config, std::ostream& out) {
  config.Validate(/*check_paths=*/true);
  const GridConfig& g = config.grid;
  auto or_base = [](const auto& list, auto base) {
    return list.empty() ? std::vector<decltype(base)>{base} : list;
  };
  const auto n_xs = or_base(g.n_x, config.model.dims.n_x);
  const auto n_zs = or_base(g.n_z, config.model.dims.n_z);
  const auto gammas = or_base(g.gamma_sq, config.model.gamma_sq);
  const auto lrs = or_base(g.learning_rate, config.train.learning_rate);

  const LoadedData data = LoadData(config);
  struct Row {
    std::string run;
    RunConfig cfg;
    TrainStatus status;
    double val_mean_rmse;
  };
  std::vector<Row> rows;
  for (std::size_t n_x : n_xs) {
    for (std::size_t n_z : n_zs) {
      for (double gamma_sq : gammas) {
        for (double lr : lrs) {
          RunConfig c = config;
          c.grid = GridConfig{};
          c.model.dims.n_x = n_x;
          c.model.dims.n_z = n_z;
          c.model.gamma_sq = gamma_sq;
          c.train.learning_rate = lr;
          char name[32];
          std::snprintf(name, sizeof(name), "run_%03zu", rows.size());
          c.output_dir = config.output_dir / name;
          c.Validate(/*check_paths=*/true);
          const TrainRun run = TrainAndSave(c, data);
          const TrainedModel& m = run.result.model;
          const MetricsReport metrics =
              Rmse(m, NormalizedSplit(m, data, "val"), "val", c.eval.horizon);
          out << name << ": val mean RMSE " << FormatReal(metrics.mean_rmse)
              << " (" << StatusName(run.result.status) << ")\n";
          rows.push_back(
              Row{name, std::move(c), run.result.status, metrics.mean_rmse});
        }
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.val_mean_rmse < b.val_mean_rmse;
  });

  std::ostringstream csv;
  csv << "format_version,rank,run,kind,n_x,n_z,gamma_sq,learning_rate,status,"
         "val_mean_rmse\n";
  Json board = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const ModelSpec& s = r.cfg.model;
    csv << kFormatVersion << ',' << i + 1 << ',' << r.run << ','
        << KindName(s.kind) << ',' << s.dims.n_x << ',' << s.dims.n_z << ','
        << FormatReal(s.gamma_sq) << ','
        << FormatReal(r.cfg.train.learning_rate) << ','
        << StatusName(r.status) << ',' << FormatReal(r.val_mean_rmse) << '\n';
    board.push_back({{"rank", i + 1},
                     {"run", r.run},
                     {"kind", std::string(KindName(s.kind))},
                     {"n_x", s.dims.n_x},
                     {"n_z", s.dims.n_z},
                     {"gamma_sq", s.gamma_sq},
                     {"learning_rate", r.cfg.train.learning_rate},
                     {"status", std::string(StatusName(r.status))},
                     {"val_mean_rmse", r.val_mean_rmse}});
  }
  EnsureDirectory(config.output_dir);
  WriteTextFile(config.output_dir / "leaderboard.csv", csv.str());
  WriteTextFile(config.output_dir / "leaderboard.json",
                Dump(Json{{"format_version", kFormatVersion},
                          {"sorted_by", "val_mean_rmse"},
                          {"runs", board}}));
  out << "leaderboard of " << rows.size() << " runs written to "
      << (config.output_dir / "leaderboard.csv").string() << "\n";
}

}  // namespace rrnn::app
