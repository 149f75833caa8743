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

#ifndef FLUXSHOT_EXPERIMENTS_H
#define FLUXSHOT_EXPERIMENTS_H

#include <string>
#include <vector>

#include "fluxshot/analysis.h"
#include "fluxshot/output.h"
#include "fluxshot/scenario.h"
#include "fluxshot/shots.h"

namespace fluxshot {

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunOptions {
    bool svg = false;
};

/// Settings shared by every experiment that synthesizes g/e single-shot batches.
struct ShotSettings {
    Amplifier amplifier = Amplifier::jpa_off;
    double prep_error = 0.0;
    bool jumps = true;
    bool shared_sigma = true;
};

/// Throws ValidationError for experiments without single-shot settings.
ShotSettings shot_settings(const ScenarioConfig& cfg);

struct SingleShotPoint {
    ShotBatch batch;
    FidelityReport report;
};

/// Synthesizes and analyzes n_shots per state of g and e at one readout setting.
SingleShotPoint single_shot_point(const ScenarioConfig& cfg, const ReadoutConfig& readout,
                                  const ShotSettings& settings);

OrderedJson fidelity_report_json(const ScenarioConfig& cfg, const SingleShotPoint& point,
                                 const ShotSettings& settings);

/// Executes the configured experiment and returns its output files in memory.
std::vector<OutputFile> run_experiment(const ScenarioConfig& cfg, const RunOptions& options);

}  // namespace fluxshot

#endif
