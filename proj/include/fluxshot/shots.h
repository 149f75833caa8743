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

#ifndef FLUXSHOT_SHOTS_H
#define FLUXSHOT_SHOTS_H

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fluxshot/dynamics.h"
#include "fluxshot/levels.h"
#include "fluxshot/model.h"
#include "fluxshot/readout.h"

namespace fluxshot {

/// Integrated single-shot records in batch units (reference-chain noise sigma = 1),
/// rotated so the g -> e separation lies along +I.
struct ShotBatch {
    std::vector<double> i_vals;
    std::vector<double> q_vals;
    std::vector<Level> prepared;
    ReadoutConfig config;
    NoiseConfig noise;
    std::uint64_t seed = 0;
    double reference_n_n = 37.5;
    double rotation = 0.0;

    std::size_t size() const { return i_vals.size(); }
    std::vector<double> i_of(Level level) const;
    std::vector<std::complex<double>> iq_of(Level level) const;
    std::size_t count(Level level) const;
};

struct SynthesisOptions {
    double prep_error = 0.0;      // probability that a g/e preparation starts in the other state
    bool jumps = true;            // sample level trajectories during the pulse
    double reference_n_n = 37.5;  // amplifier chain defining unit noise
    unsigned threads = 0;
};

/// SNR = sqrt(n_m / (n_n/2)) sin(phi), n_m = n_bar kappa_tot tau_int f and 2 phi the
/// reflected g/e pointer angle at the readout frequency.
double expected_snr(double n_bar, const CavityParams& cavity, const ReadoutConfig& cfg,
                    const NoiseConfig& noise);

/// Simulates n_shots_per_state shots for each prepared state, in order.
ShotBatch synthesize_batch(std::span<const Level> prepared, const CavityParams& cavity,
                           const ReadoutConfig& cfg, const NoiseConfig& noise,
                           const RateModel& rates, std::size_t n_shots_per_state,
                           std::uint64_t seed, const SynthesisOptions& options = {});

enum class Preparation { g, e, plus };

/// Two identical readout pulses separated by a gap, one record per pulse per shot.
struct QndRecords {
    std::vector<Preparation> prepared;
    std::vector<double> m1_i, m1_q, m2_i, m2_q;
    double gap = 0.0;
};

QndRecords synthesize_qnd(std::span<const Preparation> prepared, const CavityParams& cavity,
                          const ReadoutConfig& cfg, const NoiseConfig& noise,
                          const RateModel& rates, std::size_t n_per_preparation, double gap,
                          std::uint64_t seed, const SynthesisOptions& options = {});

struct CkpGrid {
    std::vector<double> resonator_freqs_ghz;
    std::vector<double> qubit_freqs_ghz;
};

struct CkpOptions {
    double qubit_linewidth_mhz = 0.5;           // HWHM of the qubit line
    std::optional<double> stark_per_photon_mhz; // defaults to chi_ge
    double noise = 0.0;                         // additive Gaussian noise on the flip signal
    std::uint64_t seed = 1;
};

/// Qubit flip signal versus (resonator drive, qubit drive) frequency. Row r holds
/// resonator frequency r; columns follow qubit_freqs_ghz.
struct CkpMap {
    CkpGrid grid;
    std::vector<double> signal;
    Level prepared = Level::g;
    double qubit_freq_ghz = 0.0;

    double at(std::size_t r, std::size_t q) const {
        return signal[r * grid.qubit_freqs_ghz.size() + q];
    }
};

/// Stark-shift map: the qubit line sits at qubit_freq + stark * n_bar(omega_dR) with
/// n_bar the steady photon number of the cavity pulled by `prepared`.
CkpMap ckp_map(const CavityParams& cavity, double qubit_freq_ghz, double drive_amp,
               const CkpGrid& grid, Level prepared, const CkpOptions& options = {});

}  // namespace fluxshot

#endif
