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

#ifndef FLUXSHOT_ANALYSIS_H
#define FLUXSHOT_ANALYSIS_H

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxshot/levels.h"
#include "fluxshot/model.h"
#include "fluxshot/readout.h"
#include "fluxshot/shots.h"

namespace fluxshot {

/// Upper tail probability of the standard normal.
double normal_tail(double x);
/// Inverse of erfc on (0, 2).
double erfc_inverse(double y);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for k successes out of n at z standard deviations.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.0);

struct MixtureOptions {
    bool shared_sigma = true;
    double tolerance = 1e-8;  // relative log-likelihood change
    int max_iterations = 500;
    std::size_t min_shots = 500;
};

/// Two-component Gaussian fit on the I projection of one prepared state.
struct MixtureFit {
    Level prepared = Level::g;
    std::complex<double> dominant_mean;
    std::complex<double> secondary_mean;
    double dominant_sigma = 1.0;
    double secondary_sigma = 1.0;
    double dominant_weight = 1.0;
    double log_likelihood = 0.0;
    double single_log_likelihood = 0.0;
    bool converged = false;
    bool single_component = false;
    int iterations = 0;
    std::vector<double> samples;  // I values the fit was made on

    double secondary_weight() const { return 1.0 - dominant_weight; }
};

/// Fits the shots prepared in `prepared`. EM starts from a split at the median of
/// the pooled I values of the whole batch.
MixtureFit fit_mixture(const ShotBatch& batch, Level prepared, const MixtureOptions& options = {});

/// Same fit on raw projections; `split` seeds the two clusters, `q_vals` may be empty.
MixtureFit fit_mixture(std::span<const double> i_vals, std::span<const double> q_vals,
                       double split, Level prepared = Level::g,
                       const MixtureOptions& options = {});

struct Threshold {
    double value = 0.0;
    bool e_above = true;  // outcome 1 is assigned to I > value
    double fidelity = 0.5;
    bool degenerate = false;
};

/// Exhaustive scan over midpoints of the pooled sorted I values of both fits'
/// samples; returns the lowest maximizer of the assignment fidelity.
Threshold optimal_threshold(const MixtureFit& fit_g, const MixtureFit& fit_e);
Threshold optimal_threshold(std::span<const double> i_g, std::span<const double> i_e);

struct Assignment {
    double fidelity = 0.0;
    double p0_g = 0.0;  // P(0|g)
    double p1_e = 0.0;  // P(1|e)
    Interval p0_g_ci;
    Interval p1_e_ci;
    // counts[prepared][outcome], prepared 0 = g, 1 = e
    std::array<std::array<std::size_t, 2>, 2> counts{};
};

int classify(double i_val, const Threshold& threshold);

Assignment assignment_fidelity(std::span<const double> i_g, std::span<const double> i_e,
                               const Threshold& threshold);

struct QndResult {
    double f_q = 0.0;
    double p00 = 0.0;  // P(M2 = 0 | M1 = 0)
    double p11 = 0.0;  // P(M2 = 1 | M1 = 1)
    double p10 = 0.0;  // P(M2 = 1 | M1 = 0)
    double p01 = 0.0;  // P(M2 = 0 | M1 = 1)
    Interval p00_ci;
    Interval p11_ci;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    double heralded_fidelity = 0.0;
};

/// Repeatability from binary outcome arrays (0 or 1). Throws
/// UndefinedConditionalError when an M1 class is empty.
QndResult qnd_fidelity(std::span<const int> m1, std::span<const int> m2);
/// Same statistic from conditional probabilities P(0|0) and P(1|1).
double qnd_fidelity(double p00, double p11);
/// Eq. F = [P(0|g) + P(1|e)] / 2.
double assignment_fidelity(double p0_g, double p1_e);

/// Tail mass of the dominant Gaussians on the wrong side of the threshold, averaged.
double epsilon_snr(const MixtureFit& fit_g, const MixtureFit& fit_e, const Threshold& threshold);
double epsilon_snr(const MixtureFit& fit_g, const MixtureFit& fit_e, double threshold);

struct ErrorDecomposition {
    double eps_snr = 0.0;
    double eps_prep_mix = 0.0;
};

/// eps_prep_mix averages, over both states, the secondary weight times the
/// secondary component's mass on the wrong side of the threshold.
ErrorDecomposition error_decomposition(const MixtureFit& fit_g, const MixtureFit& fit_e,
                                       const Threshold& threshold);

/// Separation of the dominant means over the sum of the dominant sigmas.
double fitted_snr(const MixtureFit& fit_g, const MixtureFit& fit_e);
/// Sample-moment SNR |mean_e - mean_g| / (sd_g + sd_e) on the I axis.
double empirical_snr(std::span<const double> i_g, std::span<const double> i_e);
double empirical_snr(const ShotBatch& batch);

/// Smallest grid integration time whose eps_snr is at most target. `tau_grid` is
/// ascending; nullopt marks an unreachable target.
std::optional<double> time_to_threshold(std::span<const double> tau_grid,
                                        std::span<const double> eps, double target_eps);

struct EfficiencyFit {
    double n_n = 0.0;
    double eta = 0.0;
    double t_n_eff = 0.0;  // K
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double intercept_err = 0.0;
    double r_squared = 0.0;
};

/// Efficiency 2 sigma0^2 / n_n with sigma0^2 = 1/2.
double efficiency_from_noise(double n_n);
/// Effective noise temperature n_n h f_r / k_B in K.
double noise_temperature(double n_n, double omega_r_ghz);

/// Linear fit of SNR against sqrt(n_bar); inverts the SNR model for n_n.
EfficiencyFit efficiency_fit(std::span<const double> sqrt_n_bar, std::span<const double> snr,
                             const CavityParams& cavity, const ReadoutConfig& cfg);

struct BlobMeans {
    std::complex<double> mean_g;
    std::complex<double> mean_e;
    double sigma = 0.0;  // pooled per-quadrature standard deviation
    double separation() const { return std::abs(mean_e - mean_g); }
};

std::vector<BlobMeans> blob_mean_trajectory(std::span<const ShotBatch> batches);

struct LorentzianFit {
    double amplitude = 0.0;
    double center = 0.0;
    double hwhm = 0.0;
    double offset = 0.0;
    double rms_residual = 0.0;
};

/// Least-squares fit of offset + amplitude / (1 + ((x - center)/hwhm)^2).
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y);

struct ExponentialFit {
    double amplitude = 0.0;
    double rate = 0.0;  // per unit of x
    double offset = 0.0;
    double rms_residual = 0.0;
};

/// Least-squares fit of offset + amplitude * exp(-rate * x) with rate > 0.
ExponentialFit fit_exponential_decay(std::span<const double> x, std::span<const double> y);

struct CkpFit {
    double chi_ge_mhz = 0.0;
    double n_bar_peak = 0.0;
    double peak_shift_mhz = 0.0;
    LorentzianFit ridge_g;  // ridge Stark shift (MHz) against resonator drive offset (MHz)
    LorentzianFit ridge_e;
    std::vector<double> shift_g;  // per-row fitted Stark shift, MHz
    std::vector<double> shift_e;
};

/// Fits the Stark ridge of each map and the ridge against resonator frequency.
/// chi_ge is the difference of the ridge centers; n_bar_peak = peak shift / chi_ge.
CkpFit fit_ckp(const CkpMap& map_g, const CkpMap& map_e);

struct Histogram {
    std::vector<double> centers;
    std::vector<std::size_t> count_g;
    std::vector<std::size_t> count_e;
};

Histogram histogram(std::span<const double> i_g, std::span<const double> i_e,
                    std::size_t bins);

struct FidelityReport {
    Threshold threshold;
    Assignment assignment;
    std::optional<QndResult> qnd;
    double eps_snr = 0.0;
    double eps_prep_mix = 0.0;
    double snr = 0.0;
    double expected_snr = 0.0;
    MixtureFit fit_g;
    MixtureFit fit_e;
};

/// Full single-shot analysis of a batch holding g and e preparations.
FidelityReport analyze_batch(const ShotBatch& batch, const MixtureOptions& options = {});

}  // namespace fluxshot

#endif
