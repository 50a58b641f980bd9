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

#ifndef RRNN_SERIALIZATION_HPP_
#define RRNN_SERIALIZATION_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rrnn/constraints.hpp"
#include "rrnn/evaluation.hpp"
#include "rrnn/numkit.hpp"
#include "rrnn/predictor.hpp"
#include "rrnn/trainer.hpp"

namespace rrnn {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// {"rows": r, "cols": c, "data": [row-major entries]}
Json MatrixToJson(const Matrix& m);
Matrix MatrixFromJson(const Json& j, std::string_view what);
Json VectorToJson(const Vector& v);
Vector VectorFromJson(const Json& j, std::string_view what);

Json NormalizationToJson(const Normalization& n);
Normalization NormalizationFromJson(const Json& j);

struct Checkpoint {
  TrainedModel model;
  std::optional<TrainStatus> status;
};

Json CheckpointToJson(const TrainedModel& model,
                      std::optional<TrainStatus> status = std::nullopt);
// Throws ConfigError on a malformed document or unknown format_version.
Checkpoint CheckpointFromJson(const Json& j);

void SaveCheckpoint(const std::filesystem::path& path,
                    const TrainedModel& model,
                    std::optional<TrainStatus> status = std::nullopt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

Json ToJson(const EpochLog& log);
Json ToJson(const DissipationReport& r);
Json ToJson(const MetricsReport& r);
Json ToJson(const GainReport& r);
Json ToJson(const ComparisonTable& t);

// Pretty-printed with a trailing newline; keys sorted, so byte-stable.
std::string Dump(const Json& j);
Json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace rrnn

#endif  // RRNN_SERIALIZATION_HPP_
