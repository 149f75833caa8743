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

#ifndef FLUXSHOT_READOUT_H
#define FLUXSHOT_READOUT_H

#include <complex>
#include <span>
#include <vector>

#include "fluxshot/levels.h"
#include "fluxshot/model.h"

namespace fluxshot {

enum class Demod { boxcar, matched };

struct ReadoutConfig {
    double drive_freq_ghz = 7.167;
    double n_bar = 0.0;          // nominal steady photon number; sets the drive amplitude
    double tau_int = 0.0;        // s
    double pulse_len = 0.0;      // s, integration covers the last tau_int of the pulse
    double f_factor_db = -11.67; // measured / radiated power ratio
    Demod demod = Demod::boxcar;

    void validate() const;
    double f_linear() const;
};

/// Amplifier chain. n_n is the added noise in photons; eta = 1 / n_n.
struct NoiseConfig {
    double n_n = 37.5;
    bool jpa_on = false;

    void validate() const;
};

/// Fixed mapping from reflected cavity amplitude to the I/Q units of a batch.
///
/// The output gain makes the steady measured photon flux equal f * kappa * n_bar,
/// so the integrated g/e separation is 2 sqrt(n_m) sin(phi) with
/// n_m = n_bar kappa tau f. Noise is white with variance n_n/2 per quadrature per
/// unit time. Batch units divide by the reference-chain noise sigma, and a rotation
/// puts the noiseless g -> e separation along +I.
struct ReadoutGeometry {
    double drive_amp = 0.0;      // sqrt(photons/s)
    double gain = 0.0;           // measured amplitude per reflected amplitude
    double rotation = 0.0;       // rad, applied as exp(i rotation)
    double unit_sigma = 1.0;     // raw noise sigma of the reference chain
    double weight_norm = 0.0;    // integral of w(t)^2 over the window, s
    std::vector<double> weights; // matched weights on a uniform grid; empty for boxcar
    std::complex<double> pointer_g;  // noiseless batch-unit record, no jumps
    std::complex<double> pointer_e;

    /// Per-quadrature noise sigma in batch units for an amplifier chain.
    double noise_sigma(const NoiseConfig& noise) const;
};

/// Builds the geometry of a single square readout pulse. `reference_n_n` fixes the
/// unit scale: the reference chain has unit noise sigma.
ReadoutGeometry make_geometry(const CavityParams& cavity, const ReadoutConfig& cfg,
                              double reference_n_n);

/// Drive sequence of a single readout pulse at amplitude `scale` times the readout drive.
std::vector<DriveSegment> readout_pulse(const ReadoutConfig& cfg, const ReadoutGeometry& geometry,
                                        double scale = 1.0);

/// Window covering the last tau_int of a pulse ending at `pulse_end`.
Window readout_window(const ReadoutConfig& cfg, double pulse_end);

/// Noiseless records (batch units) of each window for a level path through a drive sequence.
std::vector<std::complex<double>> noiseless_records(const CavityParams& cavity,
                                                    const ReadoutConfig& cfg,
                                                    const ReadoutGeometry& geometry,
                                                    std::span<const DriveSegment> drive,
                                                    const LevelTrajectory& path,
                                                    std::span<const Window> windows);

}  // namespace fluxshot

#endif
