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

#ifndef FLUXSHOT_SCENARIO_H
#define FLUXSHOT_SCENARIO_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fluxshot/dynamics.h"
#include "fluxshot/model.h"
#include "fluxshot/readout.h"

namespace fluxshot {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum class Amplifier { jpa_off, jpa_on };

struct SingleShotExperiment {
    Amplifier amplifier = Amplifier::jpa_off;
    double prep_error = 0.0;
    bool jumps = true;
    std::size_t histogram_bins = 100;
    bool shared_sigma = true;
    bool save_shots = true;
};

struct QndExperiment {
    Amplifier amplifier = Amplifier::jpa_on;
    double prep_error = 0.0;
    bool jumps = true;
    double gap = 200e-9;  // s
};

struct PowerSweepExperiment {
    Amplifier amplifier = Amplifier::jpa_off;
    double prep_error = 0.0;
    bool jumps = true;
    std::vector<double> drive_amps;  // fractions of the configured readout amplitude
    std::vector<double> tau_grid;    // s
    std::vector<double> targets{0.005, 0.001};
};

struct TimeSweepExperiment {
    Amplifier amplifier = Amplifier::jpa_off;
    double prep_error = 0.0;
    bool jumps = true;
    std::vector<double> tau_grid;  // s
    std::vector<double> targets{0.005, 0.001};
};

struct BackactionExperiment {
    Level prepared = Level::e;
    std::vector<double> a_r;
    std::vector<double> tau_leak;  // s
    std::size_t n_traj = 4000;
    double gap = 200e-9;  // s
};

struct CkpExperiment {
    double n_bar_peak = 27.0;
    double resonator_span_mhz = 40.0;
    std::size_t resonator_points = 161;
    double qubit_offset_min_mhz = -5.0;
    double qubit_offset_max_mhz = 45.0;
    std::size_t qubit_points = 501;
    double linewidth_mhz = 0.5;
    double noise = 0.0;
};

struct ResetExperiment {
    double sideband_rate = 0.0;  // 1/s
    double duration = 0.0;       // s
    std::optional<double> cavity_kappa;           // 1/s, defaults to the cavity linewidth
    std::optional<double> rethermalization_rate;  // 1/s, defaults to the thermal up rate
    std::optional<double> qubit_decay_rate;       // 1/s, defaults to the thermal down rate
};

struct EfficiencyExperiment {
    Amplifier amplifier = Amplifier::jpa_off;
    std::vector<double> n_bar_grid;
    std::optional<double> injected_n_n;
    bool jumps = false;
};

using Experiment =
    std::variant<SingleShotExperiment, QndExperiment, PowerSweepExperiment, TimeSweepExperiment,
                 BackactionExperiment, CkpExperiment, ResetExperiment, EfficiencyExperiment>;

struct Coherence {
    double t1 = 0.0;   // s
    double t2r = 0.0;  // s
    double t2e = 0.0;  // s
};

struct ScenarioConfig {
    nlohmann::json canonical;  // parsed document without output_dir
    std::string config_hash;   // SHA-256 hex of the canonical document
    std::uint64_t seed = 0;
    std::size_t n_shots = 0;
    std::filesystem::path output_dir;

    FluxoniumParams fluxonium;
    int basis_size = 60;
    std::optional<double> qubit_freq_override_ghz;
    CavityParams cavity;
    Coherence coherence;
    double temperature = 0.0;  // K
    double t1_readout_factor = 1.0;

    std::size_t num_levels = 2;
    std::vector<std::pair<std::pair<Level, Level>, double>> base_rates;
    std::vector<MistTerm> mist;

    ReadoutConfig readout;
    NoiseConfig jpa_off;
    NoiseConfig jpa_on;

    std::string experiment_name;
    Experiment experiment;

    const NoiseConfig& noise(Amplifier amp) const { return amp == Amplifier::jpa_on ? jpa_on : jpa_off; }
    /// Configured qubit frequency, or the diagonalized g -> e transition.
    double qubit_freq_ghz() const;
    /// Rate model assembled from coherence, temperature, base and MIST terms.
    RateModel rate_model() const;
};

/// Parses and validates a scenario document. Unknown keys and out-of-domain values
/// raise ValidationError.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string amplifier_name(Amplifier amp);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace fluxshot

#endif
