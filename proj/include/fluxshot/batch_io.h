// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLUXSHOT_BATCH_IO_H
#define FLUXSHOT_BATCH_IO_H

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fluxshot/readout.h"
#include "fluxshot/shots.h"

namespace fluxshot {

/// Shortest fixed-notation decimal text that parses back to exactly `value`.
std::string format_shortest(double value);
/// Fixed-point decimal text with `digits` fractional digits, locale independent.
std::string format_fixed(double value, int digits);
/// Parses a complete decimal number; throws ValidationError on trailing garbage.
double parse_double(std::string_view text);

nlohmann::json to_json(const ReadoutConfig& cfg);
nlohmann::json to_json(const NoiseConfig& noise);
ReadoutConfig readout_from_json(const nlohmann::json& j);
NoiseConfig noise_from_json(const nlohmann::json& j);

/// CSV text with header prepared,label_int,I,Q and shortest round-trip numbers.
std::string batch_csv(const ShotBatch& batch);
/// JSON sidecar describing how the batch was synthesized.
std::string batch_sidecar(const ShotBatch& batch);

/// Writes `<base>.csv` and the `<base>.json` sidecar.
void write_batch(const ShotBatch& batch, const std::filesystem::path& base);
/// Reads a batch written by write_batch. The round trip is bit exact.
ShotBatch read_batch(const std::filesystem::path& base);

}  // namespace fluxshot

#endif
