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

#include "fluxshot/shots.h"

#include <cmath>

#include "fluxshot/constants.h"
#include "fluxshot/errors.h"
#include "fluxshot/parallel.h"
#include "fluxshot/rng.h"

namespace fluxshot {

namespace {

constexpr std::uint64_t kShotTag = 0x5407;
constexpr std::uint64_t kQndTag = 0x0D0D;

Level apply_prep_error(Level level, double prep_error, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    if (level == Level::g && u < prep_error) {
        return Level::e;
    }
    if (level == Level::e && u < prep_error) {
        return Level::g;
    }
    return level;
}

void validate_options(const SynthesisOptions& options) {
    if (!(options.prep_error >= 0.0 && options.prep_error <= 1.0)) {
        throw ParameterError("prep_error must lie in [0, 1]");
    }
}

}  // namespace

std::vector<double> ShotBatch::i_of(Level level) const {
    std::vector<double> out;
    for (std::size_t k = 0; k < size(); ++k) {
        if (prepared[k] == level) {
            out.push_back(i_vals[k]);
        }
    }
    return out;
}

std::vector<std::complex<double>> ShotBatch::iq_of(Level level) const {
    std::vector<std::complex<double>> out;
    for (std::size_t k = 0; k < size(); ++k) {
        if (prepared[k] == level) {
            out.emplace_back(i_vals[k], q_vals[k]);
        }
    }
    return out;
}

std::size_t ShotBatch::count(Level level) const {
    std::size_t n = 0;
    for (Level l : prepared) {
        n += l == level ? 1 : 0;
    }
    return n;
}

double expected_snr(double n_bar, const CavityParams& cavity, const ReadoutConfig& cfg,
                    const NoiseConfig& noise) {
    if (!(n_bar >= 0.0)) {
        throw ParameterError("photon number must be non-negative");
    }
    cavity.validate();
    cfg.validate();
    noise.validate();
    const double kappa = angular_from_mhz(cavity.kappa_total_mhz());
    const double n_m = n_bar * kappa * cfg.tau_int * cfg.f_linear();
    const double phi = 0.5 * pointer_separation_angle(cavity, cfg.drive_freq_ghz);
    return std::sqrt(n_m / (0.5 * noise.n_n)) * std::sin(phi);
}

ShotBatch synthesize_batch(std::span<const Level> prepared, const CavityParams& cavity,
                           const ReadoutConfig& cfg, const NoiseConfig& noise,
                           const RateModel& rates, std::size_t n_shots_per_state,
                           std::uint64_t seed, const SynthesisOptions& options) {
    if (n_shots_per_state < 1) {
        throw ParameterError("n_shots must be at least 1");
    }
    if (prepared.empty()) {
        throw ParameterError("at least one prepared state is required");
    }
    noise.validate();
    validate_options(options);
    const ReadoutGeometry geometry = make_geometry(cavity, cfg, options.reference_n_n);
    const auto drive = readout_pulse(cfg, geometry);
    const std::vector<Window> windows{readout_window(cfg, cfg.pulse_len)};
    const PhotonSchedule photons = PhotonSchedule::from_drive(cavity, cfg.drive_freq_ghz, drive);
    const double sigma = geometry.noise_sigma(noise);

    const std::size_t total = prepared.size() * n_shots_per_state;
    ShotBatch batch;
    batch.i_vals.resize(total);
    batch.q_vals.resize(total);
    batch.prepared.resize(total);
    batch.config = cfg;
    batch.noise = noise;
    batch.seed = seed;
    batch.reference_n_n = options.reference_n_n;
    batch.rotation = geometry.rotation;

    parallel_for(
        total,
        [&](std::size_t k) {
            const Level state = prepared[k / n_shots_per_state];
            Rng rng = make_stream(seed, k, kShotTag);
            const Level start = apply_prep_error(state, options.prep_error, rng);
            LevelTrajectory path{start, {}, {}};
            if (options.jumps) {
                path = evolve(start, rates, photons, cfg.pulse_len, rng);
            }
            const auto z = noiseless_records(cavity, cfg, geometry, drive, path, windows)[0];
            std::normal_distribution<double> gauss(0.0, 1.0);
            const double ni = gauss(rng);
            const double nq = gauss(rng);
            batch.prepared[k] = state;
            batch.i_vals[k] = z.real() + sigma * ni;
            batch.q_vals[k] = z.imag() + sigma * nq;
        },
        options.threads);
    return batch;
}

QndRecords synthesize_qnd(std::span<const Preparation> prepared, const CavityParams& cavity,
                          const ReadoutConfig& cfg, const NoiseConfig& noise,
                          const RateModel& rates, std::size_t n_per_preparation, double gap,
                          std::uint64_t seed, const SynthesisOptions& options) {
    if (n_per_preparation < 1 || prepared.empty()) {
        throw ParameterError("QND synthesis needs at least one shot");
    }
    if (!(gap >= 0.0)) {
        throw ParameterError("gap must be non-negative");
    }
    noise.validate();
    validate_options(options);
    const ReadoutGeometry geometry = make_geometry(cavity, cfg, options.reference_n_n);
    const std::vector<DriveSegment> drive{{cfg.pulse_len, geometry.drive_amp},
                                          {gap, 0.0},
                                          {cfg.pulse_len, geometry.drive_amp}};
    const double end = 2.0 * cfg.pulse_len + gap;
    const std::vector<Window> windows{readout_window(cfg, cfg.pulse_len),
                                      readout_window(cfg, end)};
    const PhotonSchedule photons = PhotonSchedule::from_drive(cavity, cfg.drive_freq_ghz, drive);
    const double sigma = geometry.noise_sigma(noise);

    const std::size_t total = prepared.size() * n_per_preparation;
    QndRecords out;
    out.gap = gap;
    out.prepared.resize(total);
    out.m1_i.resize(total);
    out.m1_q.resize(total);
    out.m2_i.resize(total);
    out.m2_q.resize(total);
    parallel_for(
        total,
        [&](std::size_t k) {
            const Preparation prep = prepared[k / n_per_preparation];
            Rng rng = make_stream(seed, k, kQndTag);
            Level start = Level::g;
            if (prep == Preparation::plus) {
                start = std::bernoulli_distribution(0.5)(rng) ? Level::e : Level::g;
            } else {
                start = apply_prep_error(prep == Preparation::g ? Level::g : Level::e,
                                         options.prep_error, rng);
            }
            LevelTrajectory path{start, {}, {}};
            if (options.jumps) {
                path = evolve(start, rates, photons, end, rng);
            }
            const auto z = noiseless_records(cavity, cfg, geometry, drive, path, windows);
            std::normal_distribution<double> gauss(0.0, 1.0);
            out.prepared[k] = prep;
            out.m1_i[k] = z[0].real() + sigma * gauss(rng);
            out.m1_q[k] = z[0].imag() + sigma * gauss(rng);
            out.m2_i[k] = z[1].real() + sigma * gauss(rng);
            out.m2_q[k] = z[1].imag() + sigma * gauss(rng);
        },
        options.threads);
    return out;
}

CkpMap ckp_map(const CavityParams& cavity, double qubit_freq_ghz, double drive_amp,
               const CkpGrid& grid, Level prepared, const CkpOptions& options) {
    cavity.validate();
    if (prepared != Level::g && prepared != Level::e) {
        throw ParameterError("CKP maps are defined for g or e preparation");
    }
    if (grid.resonator_freqs_ghz.empty() || grid.qubit_freqs_ghz.empty()) {
        throw ParameterError("CKP grid must be non-empty");
    }
    if (!(options.qubit_linewidth_mhz > 0.0)) {
        throw ParameterError("qubit linewidth must be positive");
    }
    const double stark = options.stark_per_photon_mhz.value_or(cavity.chi_ge());
    CkpMap map;
    map.grid = grid;
    map.prepared = prepared;
    map.qubit_freq_ghz = qubit_freq_ghz;
    map.signal.reserve(grid.resonator_freqs_ghz.size() * grid.qubit_freqs_ghz.size());
    Rng rng = make_stream(options.seed, index_of(prepared), 0xC4B);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double f_r : grid.resonator_freqs_ghz) {
        const double n_bar = steady_photon_number(cavity, prepared, drive_amp, f_r);
        const double line_ghz = qubit_freq_ghz + stark * n_bar * 1e-3;
        for (double f_q : grid.qubit_freqs_ghz) {
            const double x = (f_q - line_ghz) * 1e3 / options.qubit_linewidth_mhz;
            double value = 1.0 / (1.0 + x * x);
            if (options.noise > 0.0) {
                value += options.noise * gauss(rng);
            }
            map.signal.push_back(value);
        }
    }
    return map;
}

}  // namespace fluxshot
