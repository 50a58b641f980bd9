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

#include "rrnn_app/config.hpp"

#include <set>
#include <string>

#include "rrnn/errors.hpp"

namespace rrnn::app {

namespace {

// Typed view of one JSON object that remembers which keys were read, so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  void GetPaths(const char* key, std::vector<std::filesystem::path>& out) {
    std::vector<std::string> raw;
    Get(key, raw);
    if (j_.contains(key)) out.assign(raw.begin(), raw.end());
  }

  void GetPath(const char* key, std::filesystem::path& out) {
    std::string raw = out.string();
    Get(key, raw);
    out = raw;
  }

  std::optional<Section> Child(const char* key) {
    used_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  void Finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) {
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string_view SourceName(DataSource s) {
  switch (s) {
    case DataSource::kSynthetic:
      return "synthetic";
    case DataSource::kDirectory:
      return "directory";
    case DataSource::kCsv:
      return "csv";
  }
  return "";
}

DataSource ParseSource(const std::string& s) {
  for (DataSource d :
       {DataSource::kSynthetic, DataSource::kDirectory, DataSource::kCsv}) {
    if (SourceName(d) == s) return d;
  }
  throw ConfigError("data.source: unknown source '" + s +
                    "' (expected synthetic, directory or csv)");
}

std::string AscentName(AscentMethod m) {
  return m == AscentMethod::kPlain ? "plain" : "adam";
}

AscentMethod ParseAscent(const std::string& s) {
  if (s == "plain") return AscentMethod::kPlain;
  if (s == "adam") return AscentMethod::kAdam;
  throw ConfigError("evaluation.ascent: expected plain or adam");
}

template <typename T>
void RequirePositive(const std::vector<T>& values, const char* what) {
  for (T v : values) {
    if (!(v > T{0})) throw ConfigError(std::string("grid.") + what + " must be > 0");
  }
}

}  // namespace

GainSearchOptions EvalConfig::GainOptions(GainMode mode,
                                          std::uint64_t seed) const {
  GainSearchOptions o = GainSearchOptions::Defaults(mode);
  o.steps = mode == GainMode::kGain ? gain_steps : incremental_steps;
  o.learning_rate = gain_learning_rate;
  o.method = ascent;
  o.cap_factor = cap_factor;
  o.init_noise = init_noise;
  o.seed = seed;
  return o;
}

void RunConfig::SyncSeeds() {
  train.seed = seed;
  data.synthetic.seed = seed;
}

void RunConfig::Validate(bool check_paths) const {
  model.Validate();
  train.Validate();
  const Dims& d = model.dims;
  const DataConfig& dc = data;
  if (dc.window_stride == 0) throw ConfigError("data.window_stride must be > 0");
  const SplitRatios& r = dc.split;
  if (r.train < 0.0 || r.val < 0.0 || r.test < 0.0 ||
      std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw ConfigError("data.split ratios must be nonnegative and sum to 1");
  }
  switch (dc.source) {
    case DataSource::kSynthetic:
      if (dc.synthetic.duration <= train.seq_len_init + train.seq_len_pred) {
        throw ConfigError(
            "data.synthetic.duration must exceed seq_len_init + seq_len_pred");
      }
      if (dc.synthetic.recordings == 0) {
        throw ConfigError("data.synthetic.recordings must be > 0");
      }
      if (!(dc.synthetic.amplitude > 0.0) || !(dc.synthetic.epsilon >= 0.0)) {
        throw ConfigError("data.synthetic: amplitude > 0 and epsilon >= 0");
      }
      if (d.n_u != 2 || d.n_y != 2) {
        throw ConfigError("synthetic benchmark has n_u = n_y = 2");
      }
      break;
    case DataSource::kDirectory:
      if (dc.directory.empty()) throw ConfigError("data.directory is empty");
      if (check_paths && !std::filesystem::is_directory(dc.directory)) {
        throw ConfigError("data.directory '" + dc.directory.string() +
                          "' does not exist");
      }
      break;
    case DataSource::kCsv:
      if (dc.csv_paths.empty()) throw ConfigError("data.csv.paths is empty");
      if (dc.schema.inputs.size() != d.n_u ||
          dc.schema.outputs.size() != d.n_y) {
        throw ConfigError("data.csv schema channel counts differ from dims");
      }
      if (check_paths) {
        for (const auto& p : dc.csv_paths) {
          if (!std::filesystem::exists(p)) {
            throw ConfigError("data.csv path '" + p.string() +
                              "' does not exist");
          }
        }
      }
      break;
  }
  if (!(dc.schema.sample_period > 0.0)) {
    throw ConfigError("data.csv.sample_period must be > 0");
  }
  const EvalConfig& e = eval;
  if (e.horizon == 0 || e.gain_horizon == 0 || e.gain_stride == 0) {
    throw ConfigError("evaluation horizons and stride must be > 0");
  }
  if (!(e.gain_learning_rate > 0.0) || !(e.cap_factor > 0.0) ||
      !(e.init_noise > 0.0)) {
    throw ConfigError("evaluation: learning rate, cap and noise must be > 0");
  }
  RequirePositive(grid.n_x, "n_x");
  RequirePositive(grid.n_z, "n_z");
  RequirePositive(grid.gamma_sq, "gamma_sq");
  RequirePositive(grid.learning_rate, "learning_rate");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

Json ToJson(const RunConfig& c) {
  const ModelSpec& m = c.model;
  const TrainConfig& t = c.train;
  const DataConfig& d = c.data;
  const EvalConfig& e = c.eval;
  std::vector<std::string> paths;
  for (const auto& p : d.csv_paths) paths.push_back(p.string());
  return Json{
      {"format_version", kFormatVersion},
      {"seed", c.seed},
      {"output_dir", c.output_dir.string()},
      {"model",
       {{"kind", std::string(KindName(m.kind))},
        {"n_u", m.dims.n_u},
        {"n_y", m.dims.n_y},
        {"n_x", m.dims.n_x},
        {"n_z", m.dims.n_z},
        {"gamma_sq", m.gamma_sq},
        {"layers", m.layers},
        {"init_layers", m.init_layers},
        {"init_scale", m.init_scale}}},
      {"train",
       {{"learning_rate", t.learning_rate},
        {"batch_size", t.batch_size},
        {"epochs", t.epochs},
        {"seq_len_pred", t.seq_len_pred},
        {"seq_len_init", t.seq_len_init},
        {"init_epochs", t.init_epochs},
        {"nu0", t.nu0},
        {"nu_decay_factor", t.nu_decay_factor},
        {"nu_decay_every", t.nu_decay_every},
        {"backtrack_steps", t.backtrack_steps},
        {"record_wall_time", t.record_wall_time}}},
      {"data",
       {{"source", std::string(SourceName(d.source))},
        {"window_stride", d.window_stride},
        {"split",
         {{"train", d.split.train}, {"val", d.split.val}, {"test", d.split.test}}},
        {"synthetic",
         {{"recordings", d.synthetic.recordings},
          {"duration", d.synthetic.duration},
          {"amplitude", d.synthetic.amplitude},
          {"epsilon", d.synthetic.epsilon}}},
        {"directory", d.directory.string()},
        {"csv",
         {{"paths", paths},
          {"inputs", d.schema.inputs},
          {"outputs", d.schema.outputs},
          {"sample_period", d.schema.sample_period},
          {"recording_column", d.schema.recording_column}}}}},
      {"evaluation",
       {{"horizon", e.horizon},
        {"gain_horizon", e.gain_horizon},
        {"gain_stride", e.gain_stride},
        {"gain_steps", e.gain_steps},
        {"incremental_steps", e.incremental_steps},
        {"gain_learning_rate", e.gain_learning_rate},
        {"ascent", AscentName(e.ascent)},
        {"cap_factor", e.cap_factor},
        {"init_noise", e.init_noise}}},
      {"grid",
       {{"n_x", c.grid.n_x},
        {"n_z", c.grid.n_z},
        {"gamma_sq", c.grid.gamma_sq},
        {"learning_rate", c.grid.learning_rate}}}};
}

RunConfig RunConfigFromJson(const Json& j) {
  RunConfig c;
  Section root(j, "config");
  int version = kFormatVersion;
  root.Get("format_version", version);
  if (version != kFormatVersion) {
    throw ConfigError("config: unsupported format_version " +
                      std::to_string(version));
  }
  root.Get("seed", c.seed);
  root.GetPath("output_dir", c.output_dir);

  if (auto s = root.Child("model")) {
    std::string kind(KindName(c.model.kind));
    s->Get("kind", kind);
    c.model.kind = ParseKind(kind);
    s->Get("n_u", c.model.dims.n_u);
    s->Get("n_y", c.model.dims.n_y);
    s->Get("n_x", c.model.dims.n_x);
    s->Get("n_z", c.model.dims.n_z);
    s->Get("gamma_sq", c.model.gamma_sq);
    s->Get("layers", c.model.layers);
    s->Get("init_layers", c.model.init_layers);
    s->Get("init_scale", c.model.init_scale);
    s->Finish();
  }
  if (auto s = root.Child("train")) {
    TrainConfig& t = c.train;
    s->Get("learning_rate", t.learning_rate);
    s->Get("batch_size", t.batch_size);
    s->Get("epochs", t.epochs);
    s->Get("seq_len_pred", t.seq_len_pred);
    s->Get("seq_len_init", t.seq_len_init);
    s->Get("init_epochs", t.init_epochs);
    s->Get("nu0", t.nu0);
    s->Get("nu_decay_factor", t.nu_decay_factor);
    s->Get("nu_decay_every", t.nu_decay_every);
    s->Get("backtrack_steps", t.backtrack_steps);
    s->Get("record_wall_time", t.record_wall_time);
    s->Finish();
  }
  if (auto s = root.Child("data")) {
    DataConfig& d = c.data;
    std::string source(SourceName(d.source));
    s->Get("source", source);
    d.source = ParseSource(source);
    s->Get("window_stride", d.window_stride);
    if (auto sp = s->Child("split")) {
      sp->Get("train", d.split.train);
      sp->Get("val", d.split.val);
      sp->Get("test", d.split.test);
      sp->Finish();
    }
    if (auto sy = s->Child("synthetic")) {
      sy->Get("recordings", d.synthetic.recordings);
      sy->Get("duration", d.synthetic.duration);
      sy->Get("amplitude", d.synthetic.amplitude);
      sy->Get("epsilon", d.synthetic.epsilon);
      sy->Finish();
    }
    s->GetPath("directory", d.directory);
    if (auto cs = s->Child("csv")) {
      cs->GetPaths("paths", d.csv_paths);
      cs->Get("inputs", d.schema.inputs);
      cs->Get("outputs", d.schema.outputs);
      cs->Get("sample_period", d.schema.sample_period);
      cs->Get("recording_column", d.schema.recording_column);
      cs->Finish();
    }
    s->Finish();
  }
  if (auto s = root.Child("evaluation")) {
    EvalConfig& e = c.eval;
    s->Get("horizon", e.horizon);
    s->Get("gain_horizon", e.gain_horizon);
    s->Get("gain_stride", e.gain_stride);
    s->Get("gain_steps", e.gain_steps);
    s->Get("incremental_steps", e.incremental_steps);
    s->Get("gain_learning_rate", e.gain_learning_rate);
    std::string ascent = AscentName(e.ascent);
    s->Get("ascent", ascent);
    e.ascent = ParseAscent(ascent);
    s->Get("cap_factor", e.cap_factor);
    s->Get("init_noise", e.init_noise);
    s->Finish();
  }
  if (auto s = root.Child("grid")) {
    s->Get("n_x", c.grid.n_x);
    s->Get("n_z", c.grid.n_z);
    s->Get("gamma_sq", c.grid.gamma_sq);
    s->Get("learning_rate", c.grid.learning_rate);
    s->Finish();
  }
  root.Finish();
  c.SyncSeeds();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return RunConfigFromJson(ReadJsonFile(path));
}

}  // namespace rrnn::app
