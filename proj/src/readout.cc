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

#include "fluxshot/readout.h"

#include <algorithm>
#include <cmath>

#include "fluxshot/constants.h"
#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

// Odd number of Simpson nodes across a window of length tau.
std::size_t simpson_nodes(double tau) {
    const auto half = static_cast<std::size_t>(std::max(32.0, std::ceil(tau / 2e-9)));
    return 2 * half + 1;
}

std::vector<double> simpson_coefficients(std::size_t nodes, double tau) {
    std::vector<double> c(nodes, 0.0);
    const double h = tau / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double m = (k == 0 || k + 1 == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        c[k] = m * h / 3.0;
    }
    return c;
}

std::vector<std::complex<double>> raw_records(const CavityParams& cavity, const ReadoutConfig& cfg,
                                              std::span<const double> weights,
                                              std::span<const DriveSegment> drive,
                                              const LevelTrajectory& path,
                                              std::span<const Window> windows) {
    if (weights.empty()) {
        return integrate_reflected(cavity, cfg.drive_freq_ghz, drive, path, windows);
    }
    const std::size_t nodes = weights.size();
    std::vector<double> times;
    times.reserve(nodes * windows.size());
    for (const auto& w : windows) {
        for (std::size_t k = 0; k < nodes; ++k) {
            times.push_back(w.start + (w.end - w.start) * static_cast<double>(k) /
                                          static_cast<double>(nodes - 1));
        }
    }
    const auto samples = sample_reflected(cavity, cfg.drive_freq_ghz, drive, path, times);
    std::vector<std::complex<double>> out(windows.size(), {0.0, 0.0});
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto coeff = simpson_coefficients(nodes, windows[w].end - windows[w].start);
        for (std::size_t k = 0; k < nodes; ++k) {
            out[w] += coeff[k] * weights[k] * samples[w * nodes + k];
        }
    }
    return out;
}

}  // namespace

void ReadoutConfig::validate() const {
    if (!(tau_int > 0.0)) {
        throw ParameterError("tau_int must be positive");
    }
    if (!(pulse_len >= tau_int)) {
        throw ParameterError("pulse_len must be at least tau_int");
    }
    if (!(f_factor_db <= 0.0)) {
        throw ParameterError("f_factor must not exceed 0 dB");
    }
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
        throw ParameterError("readout photon number must be non-negative");
    }
    if (!(drive_freq_ghz > 0.0)) {
        throw ParameterError("drive frequency must be positive");
    }
}

double ReadoutConfig::f_linear() const { return std::pow(10.0, f_factor_db / 10.0); }

void NoiseConfig::validate() const {
    if (!(n_n > 0.0) || !std::isfinite(n_n)) {
        throw ParameterError("added noise photon number must be positive");
    }
}

double ReadoutGeometry::noise_sigma(const NoiseConfig& noise) const {
    return std::sqrt(0.5 * noise.n_n * weight_norm) / unit_sigma;
}

ReadoutGeometry make_geometry(const CavityParams& cavity, const ReadoutConfig& cfg,
                              double reference_n_n) {
    cavity.validate();
    cfg.validate();
    if (!(reference_n_n > 0.0)) {
        throw ParameterError("reference noise photon number must be positive");
    }
    ReadoutGeometry geo;
    geo.drive_amp = drive_for_photon_number(cavity, cfg.n_bar, cfg.drive_freq_ghz);

    const double kappa = angular_from_mhz(cavity.kappa_total_mhz());
    const double photons_per_unit_drive = nominal_photon_number(cavity, 1.0, cfg.drive_freq_ghz);
    const double mean_gamma = 0.5 * (std::abs(reflection(cavity, cfg.drive_freq_ghz, Level::g)) +
                                     std::abs(reflection(cavity, cfg.drive_freq_ghz, Level::e)));
    geo.gain = std::sqrt(kappa * cfg.f_linear() * photons_per_unit_drive) / mean_gamma;

    const Window window = readout_window(cfg, cfg.pulse_len);
    const std::vector<DriveSegment> unit_pulse{{cfg.pulse_len, 1.0}};
    const LevelTrajectory pinned_g{Level::g, {}, {}};
    const LevelTrajectory pinned_e{Level::e, {}, {}};

    if (cfg.demod == Demod::matched) {
        const std::size_t nodes = simpson_nodes(cfg.tau_int);
        std::vector<double> times(nodes);
        for (std::size_t k = 0; k < nodes; ++k) {
            times[k] = window.start +
                       cfg.tau_int * static_cast<double>(k) / static_cast<double>(nodes - 1);
        }
        const auto a_g =
            sample_reflected(cavity, cfg.drive_freq_ghz, unit_pulse, pinned_g, times);
        const auto a_e =
            sample_reflected(cavity, cfg.drive_freq_ghz, unit_pulse, pinned_e, times);
        geo.weights.resize(nodes);
        double peak = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            geo.weights[k] = std::abs(a_e[k] - a_g[k]);
            peak = std::max(peak, geo.weights[k]);
        }
        if (!(peak > 0.0)) {
            throw DegenerateInputError("g and e pointer states coincide; matched filter undefined");
        }
        const auto coeff = simpson_coefficients(nodes, cfg.tau_int);
        geo.weight_norm = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            geo.weights[k] /= peak;
            geo.weight_norm += coeff[k] * geo.weights[k] * geo.weights[k];
        }
    } else {
        geo.weight_norm = cfg.tau_int;
    }
    geo.unit_sigma = std::sqrt(0.5 * reference_n_n * geo.weight_norm);

    const std::vector<Window> windows{window};
    const auto unit_g = raw_records(cavity, cfg, geo.weights, unit_pulse, pinned_g, windows)[0];
    const auto unit_e = raw_records(cavity, cfg, geo.weights, unit_pulse, pinned_e, windows)[0];
    const std::complex<double> separation = unit_e - unit_g;
    geo.rotation = std::abs(separation) > 0.0 ? -std::arg(separation) : 0.0;

    const auto pulse = readout_pulse(cfg, geo);
    geo.pointer_g = noiseless_records(cavity, cfg, geo, pulse, pinned_g, windows)[0];
    geo.pointer_e = noiseless_records(cavity, cfg, geo, pulse, pinned_e, windows)[0];
    return geo;
}

std::vector<DriveSegment> readout_pulse(const ReadoutConfig& cfg, const ReadoutGeometry& geometry,
                                        double scale) {
    return {{cfg.pulse_len, scale * geometry.drive_amp}};
}

Window readout_window(const ReadoutConfig& cfg, double pulse_end) {
    return {pulse_end - cfg.tau_int, pulse_end};
}

std::vector<std::complex<double>> noiseless_records(const CavityParams& cavity,
                                                    const ReadoutConfig& cfg,
                                                    const ReadoutGeometry& geometry,
                                                    std::span<const DriveSegment> drive,
                                                    const LevelTrajectory& path,
                                                    std::span<const Window> windows) {
    auto out = raw_records(cavity, cfg, geometry.weights, drive, path, windows);
    const std::complex<double> factor =
        geometry.gain * std::polar(1.0, geometry.rotation) / geometry.unit_sigma;
    for (auto& z : out) {
        z *= factor;
    }
    return out;
}

}  // namespace fluxshot
