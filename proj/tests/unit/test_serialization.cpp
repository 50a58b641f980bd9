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

#include <random>

#include <gtest/gtest.h>

#include "rrnn/errors.hpp"
#include "rrnn/params.hpp"
#include "rrnn/serialization.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace rrnn {
namespace {

TrainedModel MakeModel(ModelKind kind, std::uint64_t seed) {
  const ModelSpec spec{kind, {2, 3, 4, 4}, 12.5, 2, 1, 0.2};
  std::mt19937_64 rng(seed);
  Normalization norm;
  norm.input = {testing::RandomMatrix(2, 1, rng), Vector::Constant(2, 0.3)};
  norm.output = {testing::RandomMatrix(3, 1, rng), Vector::Constant(3, 1.7)};
  return TrainedModel{spec,
                      InitialPredictor(spec, seed),
                      LstmNetwork::Random(5, 4, 3, 1, rng),
                      norm,
                      50,
                      {"a", "b"},
                      {"p", "q", "r"}};
}

TEST(Checkpoint, RoundTripsEveryKind) {
  testing::TempDir dir;
  for (ModelKind kind : {ModelKind::kCrnn, ModelKind::kLtiRnn, ModelKind::kRnn,
                         ModelKind::kLstm}) {
    const TrainedModel m = MakeModel(kind, 9);
    const auto path = dir / (std::string(KindName(kind)) + ".json");
    SaveCheckpoint(path, m, TrainStatus::kCompleted);
    const Checkpoint c = LoadCheckpoint(path);
    EXPECT_EQ(c.model.spec, m.spec);
    EXPECT_EQ(c.model.predictor.kind(), kind);
    EXPECT_EQ(c.model.predictor.FlatParams(), m.predictor.FlatParams());
    EXPECT_EQ(Flatten(c.model.initializer), Flatten(m.initializer));
    EXPECT_EQ(c.model.normalization.output.mean, m.normalization.output.mean);
    EXPECT_EQ(c.model.input_names, m.input_names);
    EXPECT_EQ(c.model.t_init, 50u);
    ASSERT_TRUE(c.status.has_value());
    EXPECT_EQ(*c.status, TrainStatus::kCompleted);
    if (UsesInterconnection(kind)) {
      EXPECT_EQ(c.model.predictor.tilde().gamma_sq, 12.5);
    }
    // Saving the loaded model reproduces the file byte for byte.
    EXPECT_EQ(Dump(CheckpointToJson(c.model, c.status)),
              testing::ReadFile(path));
  }
}

TEST(Checkpoint, RejectsBadDocuments) {
  Json j = CheckpointToJson(MakeModel(ModelKind::kCrnn, 1));
  Json wrong_version = j;
  wrong_version["format_version"] = 99;
  EXPECT_THROW(CheckpointFromJson(wrong_version), ConfigError);
  Json missing = j;
  missing.erase("kind");
  EXPECT_THROW(CheckpointFromJson(missing), ConfigError);
  Json bad_shape = j;
  bad_shape["predictor"]["A_t"]["rows"] = 3;
  EXPECT_ANY_THROW(CheckpointFromJson(bad_shape));
}

TEST(MatrixJson, RoundTripAndErrors) {
  std::mt19937_64 rng(2);
  const Matrix m = testing::RandomMatrix(3, 2, rng);
  EXPECT_EQ(MatrixFromJson(MatrixToJson(m), "m"), m);
  Json j = MatrixToJson(m);
  j["data"].erase(0);
  EXPECT_ANY_THROW(MatrixFromJson(j, "m"));
}

TEST(Dump, SortedAndNewlineTerminated) {
  Json j;
  j["b"] = 1;
  j["a"] = 2;
  const std::string s = Dump(j);
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_EQ(s.back(), '\n');
}

TEST(EpochLogJson, UnsetFieldsAreNull) {
  EpochLog e;
  e.phase = "predictor";
  e.epoch = 3;
  const Json plain = ToJson(e);
  EXPECT_TRUE(plain["barrier"].is_null());
  EXPECT_TRUE(plain["feasible"].is_null());
  e.barrier = 1.5;
  e.feasible = true;
  const Json full = ToJson(e);
  EXPECT_EQ(full["barrier"], 1.5);
  EXPECT_EQ(full["feasible"], true);
}

}  // namespace
}  // namespace rrnn
