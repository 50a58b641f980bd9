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

#include "rrnn/serialization.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include "rrnn/errors.hpp"

namespace rrnn {

namespace {

template <typename P>
Json BlocksToJson(const P& p) {
  Json out = Json::object();
  p.ForEachBlock([&](std::string_view name, const auto& block) {
    using B = std::decay_t<decltype(block)>;
    if constexpr (std::is_same_v<B, Vector>) {
      out[std::string(name)] = VectorToJson(block);
    } else {
      out[std::string(name)] = MatrixToJson(block);
    }
  });
  return out;
}

// Fills every block of `p` (already shaped) from `j`, checking shapes.
template <typename P>
void BlocksFromJson(P& p, const Json& j, std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected object");
  p.ForEachBlock([&](std::string_view name, auto& block) {
    const std::string key(name);
    const std::string label = std::string(what) + "." + key;
    if (!j.contains(key)) throw ConfigError(label + ": missing");
    using B = std::decay_t<decltype(block)>;
    if constexpr (std::is_same_v<B, Vector>) {
      Vector v = VectorFromJson(j.at(key), label);
      if (v.size() != block.size()) throw ShapeError(label + ": wrong length");
      block = std::move(v);
    } else {
      Matrix m = MatrixFromJson(j.at(key), label);
      if (m.rows() != block.rows() || m.cols() != block.cols()) {
        throw ShapeError(label + ": wrong shape");
      }
      block = std::move(m);
    }
  });
}

Json OptionalToJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json StringList(const std::vector<std::string>& v) { return Json(v); }

Json VectorList(const std::vector<double>& v) { return Json(v); }

Checkpoint ParseCheckpoint(const Json& j) {
  if (j.value("format_version", -1) != kFormatVersion) {
    throw ConfigError("checkpoint: unsupported format_version");
  }
  ModelSpec spec;
  spec.kind = ParseKind(j.at("kind").get<std::string>());
  const Json& d = j.at("dims");
  spec.dims = Dims{d.at("n_u").get<std::size_t>(), d.at("n_y").get<std::size_t>(),
                   d.at("n_x").get<std::size_t>(), d.at("n_z").get<std::size_t>()};
  spec.gamma_sq = j.at("gamma_sq").get<double>();
  spec.layers = j.at("layers").get<std::size_t>();
  spec.init_layers = j.at("init_layers").get<std::size_t>();
  spec.init_scale = j.at("init_scale").get<double>();
  spec.Validate();
  const Dims& dims = spec.dims;

  PredictorParams params;
  switch (spec.kind) {
    case ModelKind::kCrnn:
    case ModelKind::kLtiRnn: {
      TildeParams p = TildeParams::Zero(dims, spec.gamma_sq);
      BlocksFromJson(p, j.at("predictor"), "predictor");
      params = std::move(p);
      break;
    }
    case ModelKind::kRnn: {
      RnnParams p = RnnParams::Zero(dims.n_u, dims.n_x, dims.n_y, spec.layers);
      BlocksFromJson(p, j.at("predictor"), "predictor");
      params = std::move(p);
      break;
    }
    case ModelKind::kLstm: {
      LstmNetwork p =
          LstmNetwork::Zero(dims.n_u, dims.n_x, dims.n_y, spec.layers);
      BlocksFromJson(p, j.at("predictor"), "predictor");
      params = std::move(p);
      break;
    }
  }
  LstmInitializer init = LstmNetwork::Zero(dims.n_u + dims.n_y, dims.n_x,
                                           dims.n_y, spec.init_layers);
  BlocksFromJson(init, j.at("initializer"), "initializer");

  Normalization norm = NormalizationFromJson(j.at("normalization"));
  if (static_cast<std::size_t>(norm.input.mean.size()) != dims.n_u ||
      static_cast<std::size_t>(norm.output.mean.size()) != dims.n_y) {
    throw ShapeError("checkpoint: normalization channel counts differ");
  }
  auto names = [&](const char* key, std::size_t n) {
    auto v = j.at(key).get<std::vector<std::string>>();
    if (v.size() != n) throw ShapeError(std::string("checkpoint: ") + key);
    return v;
  };

  Checkpoint cp{TrainedModel{spec, Predictor(spec.kind, std::move(params)),
                             std::move(init), std::move(norm),
                             j.at("t_init").get<std::size_t>(),
                             names("input_names", dims.n_u),
                             names("output_names", dims.n_y)},
                std::nullopt};
  if (j.contains("status") && !j.at("status").is_null()) {
    const auto s = j.at("status").get<std::string>();
    for (TrainStatus t : {TrainStatus::kCompleted,
                          TrainStatus::kStoppedByLineSearch,
                          TrainStatus::kNumericFailure}) {
      if (StatusName(t) == s) cp.status = t;
    }
    if (!cp.status) throw ConfigError("checkpoint: unknown status '" + s + "'");
  }
  return cp;
}

}  // namespace

Json MatrixToJson(const Matrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()},
              {"data", RowMajorEntries(m)}};
}

Matrix MatrixFromJson(const Json& j, std::string_view what) {
  try {
    return MatrixFromRowMajor(j.at("rows").get<std::size_t>(),
                              j.at("cols").get<std::size_t>(),
                              j.at("data").get<std::vector<double>>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": malformed matrix (" + e.what() +
                      ")");
  }
}

Json VectorToJson(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const Json& j, std::string_view what) {
  std::vector<double> values;
  try {
    values = j.get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": malformed vector (" + e.what() +
                      ")");
  }
  Vector v = Eigen::Map<const Vector>(values.data(),
                                      static_cast<Eigen::Index>(values.size()));
  RequireFinite(v, what);
  return v;
}

Json NormalizationToJson(const Normalization& n) {
  return Json{{"input",
               {{"mean", VectorToJson(n.input.mean)},
                {"std", VectorToJson(n.input.std)}}},
              {"output",
               {{"mean", VectorToJson(n.output.mean)},
                {"std", VectorToJson(n.output.std)}}}};
}

Normalization NormalizationFromJson(const Json& j) {
  auto stats = [&](const char* key) {
    const Json& s = j.at(key);
    ChannelStats c{VectorFromJson(s.at("mean"), "normalization mean"),
                   VectorFromJson(s.at("std"), "normalization std")};
    if (c.mean.size() != c.std.size() || (c.std.array() <= 0.0).any()) {
      throw ConfigError("normalization: bad statistics");
    }
    return c;
  };
  return Normalization{stats("input"), stats("output")};
}

Json CheckpointToJson(const TrainedModel& model,
                      std::optional<TrainStatus> status) {
  const ModelSpec& spec = model.spec;
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = std::string(KindName(spec.kind));
  j["dims"] = {{"n_u", spec.dims.n_u},
               {"n_y", spec.dims.n_y},
               {"n_x", spec.dims.n_x},
               {"n_z", spec.dims.n_z}};
  j["gamma_sq"] = spec.gamma_sq;
  j["layers"] = spec.layers;
  j["init_layers"] = spec.init_layers;
  j["init_scale"] = spec.init_scale;
  j["t_init"] = model.t_init;
  j["input_names"] = StringList(model.input_names);
  j["output_names"] = StringList(model.output_names);
  j["predictor"] = std::visit([](const auto& p) { return BlocksToJson(p); },
                              model.predictor.params());
  j["initializer"] = BlocksToJson(model.initializer);
  j["normalization"] = NormalizationToJson(model.normalization);
  j["status"] = status ? Json(std::string(StatusName(*status))) : Json(nullptr);
  return j;
}

Checkpoint CheckpointFromJson(const Json& j) {
  try {
    return ParseCheckpoint(j);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const TrainedModel& model,
                    std::optional<TrainStatus> status) {
  WriteTextFile(path, Dump(CheckpointToJson(model, status)));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return CheckpointFromJson(ReadJsonFile(path));
}

Json ToJson(const EpochLog& log) {
  return Json{{"format_version", kFormatVersion},
              {"phase", log.phase},
              {"epoch", log.epoch},
              {"mse", log.mse},
              {"barrier", OptionalToJson(log.barrier)},
              {"nu_barrier", OptionalToJson(log.nu_barrier)},
              {"nu", log.nu},
              {"feasibility_margin", OptionalToJson(log.feasibility_margin)},
              {"feasible", log.feasible ? Json(*log.feasible) : Json(nullptr)},
              {"grad_norm", log.grad_norm},
              {"backtrack_count", log.backtrack_count},
              {"skipped_steps", log.skipped_steps},
              {"accepted_steps", log.accepted_steps},
              {"infeasible_steps", log.infeasible_steps},
              {"wall_time", log.wall_time}};
}

Json ToJson(const DissipationReport& r) {
  Json j{{"format_version", kFormatVersion},
         {"steps", r.steps},
         {"violations", r.violations},
         {"worst_slack", r.worst_slack},
         {"worst_step", r.worst_step},
         {"output_energy", r.output_energy},
         {"input_energy", r.input_energy},
         {"gamma_sq", r.gamma_sq},
         {"gamma0", r.gamma0},
         {"bound_slack", r.bound_slack},
         {"bound_holds", r.bound_holds},
         {"tolerance", r.tolerance},
         {"passed", r.passed()}};
  if (!r.slacks.empty()) j["slacks"] = VectorList(r.slacks);
  return j;
}

Json ToJson(const MetricsReport& r) {
  Json rmse = Json::object();
  for (std::size_t i = 0; i < r.channels.size(); ++i) {
    rmse[r.channels[i]] = r.rmse(static_cast<Eigen::Index>(i));
  }
  return Json{{"format_version", kFormatVersion},
              {"split", r.split},
              {"channels", StringList(r.channels)},
              {"rmse", rmse},
              {"mean_rmse", r.mean_rmse},
              {"sequence_count", r.sequence_count},
              {"horizon", r.horizon},
              {"warnings", StringList(r.warnings)}};
}

Json ToJson(const GainReport& r) {
  Json seqs = Json::array();
  for (const SequenceGain& s : r.sequences) {
    seqs.push_back({{"best", s.best},
                    {"best_step", s.best_step},
                    {"failed", s.failed},
                    {"failure", s.failure},
                    {"cap_hit", s.cap_hit},
                    {"perturbed_input_energy", s.perturbed_input_energy},
                    {"trace", VectorList(s.trace)}});
  }
  Json j{{"format_version", kFormatVersion},
         {"mode", std::string(GainModeName(r.mode))},
         {"max_gain", r.max_gain},
         {"failures", r.failures},
         {"steps", r.steps},
         {"learning_rate", r.learning_rate},
         {"method", r.method == AscentMethod::kPlain ? "plain" : "adam"},
         {"cap_factor", r.cap_factor},
         {"cap_note", r.cap_note},
         {"sequences", seqs}};
  if (r.witness) {
    j["witness"] = {{"sequence", r.witness->sequence},
                    {"x0", VectorToJson(r.witness->x0)},
                    {"input", MatrixToJson(r.witness->input)},
                    {"perturbation", MatrixToJson(r.witness->perturbation)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json ToJson(const ComparisonTable& t) {
  Json rows = Json::array();
  for (const ComparisonRow& r : t.rows) {
    rows.push_back({{"model", r.name},
                    {"rmse", VectorToJson(r.rmse)},
                    {"mean_rmse", r.mean_rmse},
                    {"gamma_sq_star", OptionalToJson(r.gain)},
                    {"gamma_sq_inc_star", OptionalToJson(r.incremental_gain)},
                    {"configured_gamma_sq",
                     OptionalToJson(r.configured_gamma_sq)}});
  }
  return Json{{"format_version", kFormatVersion},
              {"split", t.split},
              {"horizon", t.horizon},
              {"channels", StringList(t.channels)},
              {"rows", rows}};
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace rrnn
