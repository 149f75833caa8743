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

#ifndef FLUXSHOT_CLI_H
#define FLUXSHOT_CLI_H

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fluxshot/scenario.h"

namespace fluxshot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

struct RunRequest {
    std::filesystem::path config;
    std::optional<std::filesystem::path> output_dir;
    bool svg = false;
};

struct SweepRequest {
    std::filesystem::path config;
    std::string axis;  // drive_amp or tau_int
    std::vector<double> grid;  // amplitude factors, or integration times in us
    std::optional<std::filesystem::path> output_dir;
    bool svg = false;
};

struct SweepOutcome {
    std::filesystem::path directory;
    std::size_t warnings = 0;
};

struct ReportRequest {
    std::filesystem::path directory;
    std::optional<std::filesystem::path> output;  // defaults to the scanned directory
};

/// `<output_dir>/<experiment>/<first 16 hex digits of the config hash>`.
std::filesystem::path run_directory(const ScenarioConfig& cfg);

std::filesystem::path execute_run(const RunRequest& request);
SweepOutcome execute_sweep(const SweepRequest& request, std::ostream& err);
std::filesystem::path execute_report(const ReportRequest& request);
ScenarioConfig execute_validate(const std::filesystem::path& config);

/// Checks every file listed in a manifest; throws IntegrityError on mismatch.
void verify_manifest(const std::filesystem::path& manifest);

/// Runs `body`, printing diagnostics for any exception and mapping it to an exit code.
int guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace fluxshot

#endif
