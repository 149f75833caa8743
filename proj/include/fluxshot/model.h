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

#ifndef FLUXSHOT_MODEL_H
#define FLUXSHOT_MODEL_H

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "fluxshot/levels.h"

namespace fluxshot {

// Frequencies are stored as ordinary frequencies (GHz or MHz, as the field
// name says). Conversion to angular units happens only inside the dynamics.

struct FluxoniumParams {
    double e_j = 0.0;  // GHz
    double e_c = 0.0;  // GHz
    double e_l = 0.0;  // GHz
    double phi_ext = 0.0;  // rad, pi is half a flux quantum

    void validate() const;
};

struct EnergySpectrum {
    std::vector<double> levels;  // GHz relative to the ground state
    int basis_size = 0;
    bool converged = false;

    /// Transition frequency in GHz.
    double transition(Level from, Level to) const;
};

struct DiagonalizeOptions {
    int max_basis_size = 480;
    double tolerance_ghz = 1e-5;  // 10 kHz on the lowest six levels
    std::size_t reported_levels = 10;
};

/// Spectrum of H/h = 4 e_c n^2 + e_l phi^2 / 2 - e_j cos(phi - phi_ext) in a
/// harmonic-oscillator basis. The basis is doubled from `basis_size` until the
/// lowest six levels move by less than the tolerance.
EnergySpectrum diagonalize(const FluxoniumParams& params, int basis_size = 60,
                           const DiagonalizeOptions& options = {});

/// Raw eigenvalues (GHz, absolute) for one fixed basis size. No convergence check.
std::vector<double> fluxonium_eigenvalues(const FluxoniumParams& params, int basis_size);

struct CavityParams {
    double omega_r_ghz = 0.0;
    double kappa_s_mhz = 0.0;    // strong (measurement) port
    double kappa_w_mhz = 0.0;    // weak (drive) port
    double kappa_int_mhz = 0.0;  // internal loss
    std::map<Level, double> chi_mhz;  // cavity pull per occupied level

    double kappa_total_mhz() const { return kappa_s_mhz + kappa_w_mhz + kappa_int_mhz; }
    /// Throws LookupError when the level has no dispersive shift entry.
    double chi(Level level) const;
    double chi_ge() const { return chi(Level::e) - chi(Level::g); }
    void validate() const;
};

/// Ordinary-frequency detuning in MHz of the drive from the level-pulled cavity.
double detuning_mhz(const CavityParams& cavity, double drive_freq_ghz, Level level);

/// Strong-port reflection coefficient 1 - kappa_s / (kappa_tot/2 - i Delta).
std::complex<double> reflection(const CavityParams& cavity, double drive_freq_ghz, Level level);

/// Angle 2*phi in radians, in [0, pi], between the g and e reflected pointer states.
double pointer_separation_angle(const CavityParams& cavity, double drive_freq_ghz);

struct PointerTrajectory {
    std::vector<double> times;  // s
    std::vector<std::complex<double>> alpha;
    Level level = Level::g;
};

/// Complex decay constant kappa_tot/2 + i Delta of the driven cavity, in 1/s.
std::complex<double> cavity_decay_constant(const CavityParams& cavity, double drive_freq_ghz,
                                           Level level);
/// Steady-state amplitude -sqrt(kappa_s) eps / (kappa_tot/2 + i Delta).
std::complex<double> steady_amplitude(const CavityParams& cavity, Level level, double drive_amp,
                                      double drive_freq_ghz);

/// Closed-form solution of the driven cavity from `alpha0` after time `t`.
std::complex<double> cavity_field(const CavityParams& cavity, Level level, double drive_amp,
                                  double drive_freq_ghz, std::complex<double> alpha0, double t);

/// Integrates d alpha/dt = -i Delta alpha - (kappa/2) alpha - sqrt(kappa_s) eps from
/// vacuum with fixed-step RK4. Throws DiscretizationError when dt > 0.05 / kappa.
PointerTrajectory ring_up(const CavityParams& cavity, Level level, double drive_amp,
                          double drive_freq_ghz, double duration, double dt);

double steady_photon_number(const CavityParams& cavity, Level level, double drive_amp,
                            double drive_freq_ghz);

/// Mean steady photon number of the g and e pointer states.
double nominal_photon_number(const CavityParams& cavity, double drive_amp, double drive_freq_ghz);

/// Drive amplitude (sqrt(photons/s)) giving the requested nominal photon number.
double drive_for_photon_number(const CavityParams& cavity, double n_bar, double drive_freq_ghz);

/// Average dispersive pull of g and e; the cavity seen by an unconditioned drive.
double mean_chi_ge(const CavityParams& cavity);

/// Square drive segment applied to the strong port.
struct DriveSegment {
    double duration = 0.0;   // s
    double drive_amp = 0.0;  // sqrt(photons/s)
};

/// Integration window on the absolute sequence clock.
struct Window {
    double start = 0.0;
    double end = 0.0;
};

/// Integrals of the reflected amplitude eps(t) + sqrt(kappa_s) alpha(t) over each
/// window, with the cavity following the qubit level along `path`. Piecewise
/// closed-form; exact for the square drive model. Units: sqrt(photons/s) * s.
std::vector<std::complex<double>> integrate_reflected(const CavityParams& cavity,
                                                      double drive_freq_ghz,
                                                      std::span<const DriveSegment> drive,
                                                      const LevelTrajectory& path,
                                                      std::span<const Window> windows);

/// Reflected amplitude sampled at ascending `times`.
std::vector<std::complex<double>> sample_reflected(const CavityParams& cavity,
                                                   double drive_freq_ghz,
                                                   std::span<const DriveSegment> drive,
                                                   const LevelTrajectory& path,
                                                   std::span<const double> times);

/// Closed-form cavity field over [start, end) under a constant drive.
struct FieldSegment {
    double start = 0.0;
    double end = 0.0;
    std::complex<double> alpha0;
    std::complex<double> steady;
    std::complex<double> lambda;

    std::complex<double> at(double t) const {
        return steady + (alpha0 - steady) * std::exp(-lambda * (t - start));
    }
    /// Upper bound on |alpha|^2 anywhere inside the segment.
    double photon_bound() const {
        const double r = std::abs(steady) + std::abs(alpha0 - steady);
        return r * r;
    }
};

/// Segments of the nominal (mean g/e pull) cavity field for a drive sequence,
/// followed by an unbounded ring-down segment.
std::vector<FieldSegment> nominal_field_segments(const CavityParams& cavity,
                                                 double drive_freq_ghz,
                                                 std::span<const DriveSegment> drive);

/// Cavity field of the nominal (mean g/e) cavity at ascending `times`.
std::vector<std::complex<double>> nominal_field(const CavityParams& cavity, double drive_freq_ghz,
                                                std::span<const DriveSegment> drive,
                                                std::span<const double> times);

/// Power ratio estimate 1/4 (kappa_s/kappa_tot) |Gamma|^2 in dB, |Gamma| averaged over g and e.
double analytic_f_factor_db(const CavityParams& cavity, double drive_freq_ghz);

}  // namespace fluxshot

#endif
