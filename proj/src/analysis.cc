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

#include "fluxshot/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Core>

#include "fluxshot/constants.h"
#include "fluxshot/errors.h"
#include "fluxshot/lm.h"

namespace fluxshot {

namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

double gaussian_log_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLogSqrtTwoPi;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) {
        s += (x - mean) * (x - mean);
    }
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

struct ScanResult {
    double value = 0.0;
    std::uint64_t score = 0;
    bool found = false;
};

ScanResult scan(std::vector<double> g, std::vector<double> e, bool e_above) {
    std::sort(g.begin(), g.end());
    std::sort(e.begin(), e.end());
    std::vector<double> pooled;
    pooled.reserve(g.size() + e.size());
    std::merge(g.begin(), g.end(), e.begin(), e.end(), std::back_inserter(pooled));
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
    const std::uint64_t ng = g.size();
    const std::uint64_t ne = e.size();
    ScanResult best;
    std::size_t ig = 0;
    std::size_t ie = 0;
    for (std::size_t k = 0; k + 1 < pooled.size(); ++k) {
        const double m = 0.5 * (pooled[k] + pooled[k + 1]);
        while (ig < g.size() && g[ig] < m) {
            ++ig;
        }
        while (ie < e.size() && e[ie] < m) {
            ++ie;
        }
        const std::uint64_t g_below = ig;
        const std::uint64_t e_below = ie;
        const std::uint64_t score = e_above ? g_below * ne + (ne - e_below) * ng
                                            : (ng - g_below) * ne + e_below * ng;
        if (!best.found || score > best.score) {
            best = {m, score, true};
        }
    }
    return best;
}

Threshold threshold_scan(std::span<const double> i_g, std::span<const double> i_e, bool e_above,
                         double fallback) {
    if (i_g.empty() || i_e.empty()) {
        throw ParameterError("threshold search needs shots of both states");
    }
    const std::uint64_t chance = static_cast<std::uint64_t>(i_g.size()) * i_e.size();
    std::vector<double> g(i_g.begin(), i_g.end());
    std::vector<double> e(i_e.begin(), i_e.end());
    ScanResult best = scan(g, e, e_above);
    if (best.found && best.score < chance) {
        e_above = !e_above;
        best = scan(g, e, e_above);
    }
    Threshold out;
    out.e_above = e_above;
    if (!best.found || best.score == chance) {
        out.value = fallback;
        out.fidelity = 0.5;
        out.degenerate = true;
        return out;
    }
    out.value = best.value;
    out.fidelity = static_cast<double>(best.score) / (2.0 * static_cast<double>(chance));
    return out;
}

void check_fit(const MixtureFit& fit) {
    if (!(fit.dominant_sigma > 0.0) || !(fit.secondary_sigma > 0.0)) {
        throw ParameterError("mixture fit has non-positive sigma");
    }
}

double wrong_side_mass(double mu, double sigma, double threshold, bool wrong_is_above) {
    return wrong_is_above ? normal_tail((threshold - mu) / sigma)
                          : normal_tail((mu - threshold) / sigma);
}

}  // namespace

double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double erfc_inverse(double y) {
    if (!(y > 0.0 && y < 2.0)) {
        throw ParameterError("erfc_inverse needs an argument in (0, 2)");
    }
    double lo = -27.0;
    double hi = 27.0;
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (std::erfc(mid) > y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int k = 0; k < 3; ++k) {
        const double d = -2.0 / std::sqrt(kPi) * std::exp(-x * x);
        if (d == 0.0) {
            break;
        }
        x -= (std::erfc(x) - y) / d;
    }
    return x;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

MixtureFit fit_mixture(const ShotBatch& batch, Level prepared, const MixtureOptions& options) {
    std::vector<double> i_vals;
    std::vector<double> q_vals;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        if (batch.prepared[k] == prepared) {
            i_vals.push_back(batch.i_vals[k]);
            q_vals.push_back(batch.q_vals[k]);
        }
    }
    if (i_vals.size() < options.min_shots) {
        throw ParameterError("mixture fit needs at least " + std::to_string(options.min_shots) +
                             " shots of the prepared state");
    }
    return fit_mixture(i_vals, q_vals, median_of(batch.i_vals), prepared, options);
}

MixtureFit fit_mixture(std::span<const double> x, std::span<const double> q, double split,
                       Level prepared, const MixtureOptions& options) {
    const std::size_t n = x.size();
    if (n < options.min_shots || n < 2) {
        throw ParameterError("mixture fit needs at least " + std::to_string(options.min_shots) +
                             " shots");
    }
    if (!q.empty() && q.size() != n) {
        throw ParameterError("I and Q arrays differ in length");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw ParameterError("mixture fit input contains non-finite values");
        }
    }
    const double mean_all = mean_of(x);
    const double var_all = variance_of(x, mean_all);
    if (!(var_all > 0.0)) {
        throw DegenerateInputError("mixture fit input has zero variance");
    }
    const double var_floor = 1e-12 * var_all;

    auto halves = [&](double s) {
        std::vector<double> lo;
        std::vector<double> hi;
        for (double v : x) {
            (v < s ? lo : hi).push_back(v);
        }
        return std::pair{lo, hi};
    };
    auto [lo, hi] = halves(split);
    if (lo.size() < 2 || hi.size() < 2) {
        std::tie(lo, hi) = halves(median_of(std::vector<double>(x.begin(), x.end())));
    }
    if (lo.size() < 2 || hi.size() < 2) {
        std::tie(lo, hi) = halves(mean_all);
    }
    double mu[2] = {mean_of(lo), mean_of(hi)};
    const double within = (variance_of(lo, mu[0]) * static_cast<double>(lo.size()) +
                           variance_of(hi, mu[1]) * static_cast<double>(hi.size())) /
                          static_cast<double>(n);
    double var[2] = {std::max(within, var_floor), std::max(within, var_floor)};
    double w[2];
    w[0] = std::clamp(static_cast<double>(lo.size()) / static_cast<double>(n), 0.01, 0.99);
    w[1] = 1.0 - w[0];

    std::vector<double> r1(n);
    double ll = -std::numeric_limits<double>::infinity();
    MixtureFit fit;
    fit.prepared = prepared;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        double ll_new = 0.0;
        const double s0 = std::sqrt(var[0]);
        const double s1 = std::sqrt(var[1]);
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::log(w[0]) + gaussian_log_pdf(x[k], mu[0], s0);
            const double b = std::log(w[1]) + gaussian_log_pdf(x[k], mu[1], s1);
            const double m = std::max(a, b);
            const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
            r1[k] = std::exp(b - lse);
            ll_new += lse;
        }
        double n1 = 0.0;
        double sx1 = 0.0;
        double sx0 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            n1 += r1[k];
            sx1 += r1[k] * x[k];
            sx0 += (1.0 - r1[k]) * x[k];
        }
        const double n0 = static_cast<double>(n) - n1;
        if (n0 <= 1e-9 || n1 <= 1e-9) {
            ll = ll_new;
            break;
        }
        mu[0] = sx0 / n0;
        mu[1] = sx1 / n1;
        double ss0 = 0.0;
        double ss1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            ss0 += (1.0 - r1[k]) * (x[k] - mu[0]) * (x[k] - mu[0]);
            ss1 += r1[k] * (x[k] - mu[1]) * (x[k] - mu[1]);
        }
        if (options.shared_sigma) {
            var[0] = var[1] = std::max((ss0 + ss1) / static_cast<double>(n), var_floor);
        } else {
            var[0] = std::max(ss0 / n0, var_floor);
            var[1] = std::max(ss1 / n1, var_floor);
        }
        w[0] = n0 / static_cast<double>(n);
        w[1] = n1 / static_cast<double>(n);
        const bool done = std::abs(ll_new - ll) <= options.tolerance * std::abs(ll_new);
        ll = ll_new;
        if (done) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = it;

    double single_ll = 0.0;
    const double s_all = std::sqrt(var_all);
    for (double v : x) {
        single_ll += gaussian_log_pdf(v, mean_all, s_all);
    }
    fit.single_log_likelihood = single_ll;
    const double log_n = std::log(static_cast<double>(n));
    const double k_mix = options.shared_sigma ? 4.0 : 5.0;
    const double bic_mix = k_mix * log_n - 2.0 * ll;
    const double bic_single = 2.0 * log_n - 2.0 * single_ll;
    const double q_all = q.empty() ? 0.0 : mean_of(q);

    if (!std::isfinite(ll) || bic_single <= bic_mix) {
        fit.single_component = true;
        fit.converged = true;
        fit.dominant_mean = {mean_all, q_all};
        fit.secondary_mean = fit.dominant_mean;
        fit.dominant_sigma = fit.secondary_sigma = s_all;
        fit.dominant_weight = 1.0;
        fit.log_likelihood = single_ll;
    } else {
        const int d = w[1] > w[0] ? 1 : 0;
        const int s = 1 - d;
        double q_mean[2] = {0.0, 0.0};
        if (!q.empty()) {
            double qs0 = 0.0;
            double qs1 = 0.0;
            double n1 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                qs1 += r1[k] * q[k];
                qs0 += (1.0 - r1[k]) * q[k];
                n1 += r1[k];
            }
            q_mean[0] = qs0 / (static_cast<double>(n) - n1);
            q_mean[1] = qs1 / n1;
        }
        fit.dominant_mean = {mu[d], q_mean[d]};
        fit.secondary_mean = {mu[s], q_mean[s]};
        fit.dominant_sigma = std::sqrt(var[d]);
        fit.secondary_sigma = std::sqrt(var[s]);
        fit.dominant_weight = w[d];
        fit.log_likelihood = ll;
    }
    fit.samples.assign(x.begin(), x.end());
    return fit;
}

Threshold optimal_threshold(const MixtureFit& fit_g, const MixtureFit& fit_e) {
    const double mg = fit_g.dominant_mean.real();
    const double me = fit_e.dominant_mean.real();
    return threshold_scan(fit_g.samples, fit_e.samples, me >= mg, 0.5 * (mg + me));
}

Threshold optimal_threshold(std::span<const double> i_g, std::span<const double> i_e) {
    if (i_g.empty() || i_e.empty()) {
        throw ParameterError("threshold search needs shots of both states");
    }
    const double mg = mean_of(i_g);
    const double me = mean_of(i_e);
    return threshold_scan(i_g, i_e, me >= mg, 0.5 * (mg + me));
}

int classify(double i_val, const Threshold& threshold) {
    return (threshold.e_above ? i_val > threshold.value : i_val < threshold.value) ? 1 : 0;
}

Assignment assignment_fidelity(std::span<const double> i_g, std::span<const double> i_e,
                               const Threshold& threshold) {
    if (i_g.empty() || i_e.empty()) {
        throw ParameterError("assignment fidelity needs shots of both states");
    }
    Assignment out;
    for (double v : i_g) {
        ++out.counts[0][classify(v, threshold)];
    }
    for (double v : i_e) {
        ++out.counts[1][classify(v, threshold)];
    }
    out.p0_g = static_cast<double>(out.counts[0][0]) / static_cast<double>(i_g.size());
    out.p1_e = static_cast<double>(out.counts[1][1]) / static_cast<double>(i_e.size());
    out.p0_g_ci = wilson_interval(out.counts[0][0], i_g.size());
    out.p1_e_ci = wilson_interval(out.counts[1][1], i_e.size());
    out.fidelity = assignment_fidelity(out.p0_g, out.p1_e);
    return out;
}

double assignment_fidelity(double p0_g, double p1_e) {
    if (!(p0_g >= 0.0 && p0_g <= 1.0 && p1_e >= 0.0 && p1_e <= 1.0)) {
        throw ParameterError("probabilities must lie in [0, 1]");
    }
    return 0.5 * (p0_g + p1_e);
}

double qnd_fidelity(double p00, double p11) { return assignment_fidelity(p00, p11); }

QndResult qnd_fidelity(std::span<const int> m1, std::span<const int> m2) {
    if (m1.size() != m2.size()) {
        throw ParameterError("M1 and M2 outcome arrays differ in length");
    }
    std::size_t n[2] = {0, 0};
    std::size_t same[2] = {0, 0};
    for (std::size_t k = 0; k < m1.size(); ++k) {
        if ((m1[k] != 0 && m1[k] != 1) || (m2[k] != 0 && m2[k] != 1)) {
            throw ParameterError("outcomes must be 0 or 1");
        }
        ++n[m1[k]];
        same[m1[k]] += m1[k] == m2[k] ? 1 : 0;
    }
    if (n[0] == 0 || n[1] == 0) {
        throw UndefinedConditionalError("an M1 outcome class is empty; P(x|x) is undefined");
    }
    QndResult out;
    out.n0 = n[0];
    out.n1 = n[1];
    out.p00 = static_cast<double>(same[0]) / static_cast<double>(n[0]);
    out.p11 = static_cast<double>(same[1]) / static_cast<double>(n[1]);
    out.p10 = static_cast<double>(n[0] - same[0]) / static_cast<double>(n[0]);
    out.p01 = static_cast<double>(n[1] - same[1]) / static_cast<double>(n[1]);
    out.p00_ci = wilson_interval(same[0], n[0]);
    out.p11_ci = wilson_interval(same[1], n[1]);
    out.f_q = qnd_fidelity(out.p00, out.p11);
    out.heralded_fidelity = 0.5 * ((1.0 - out.p10) + (1.0 - out.p01));
    return out;
}

double epsilon_snr(const MixtureFit& fit_g, const MixtureFit& fit_e, const Threshold& threshold) {
    check_fit(fit_g);
    check_fit(fit_e);
    const double mg = fit_g.dominant_mean.real();
    const double me = fit_e.dominant_mean.real();
    const double t = threshold.value;
    return 0.5 * (wrong_side_mass(mg, fit_g.dominant_sigma, t, threshold.e_above) +
                  wrong_side_mass(me, fit_e.dominant_sigma, t, !threshold.e_above));
}

double epsilon_snr(const MixtureFit& fit_g, const MixtureFit& fit_e, double threshold) {
    Threshold t;
    t.value = threshold;
    t.e_above = fit_e.dominant_mean.real() >= fit_g.dominant_mean.real();
    return epsilon_snr(fit_g, fit_e, t);
}

ErrorDecomposition error_decomposition(const MixtureFit& fit_g, const MixtureFit& fit_e,
                                       const Threshold& threshold) {
    ErrorDecomposition out;
    out.eps_snr = epsilon_snr(fit_g, fit_e, threshold);
    const double t = threshold.value;
    const double mix_g =
        fit_g.secondary_weight() *
        wrong_side_mass(fit_g.secondary_mean.real(), fit_g.secondary_sigma, t, threshold.e_above);
    const double mix_e =
        fit_e.secondary_weight() * wrong_side_mass(fit_e.secondary_mean.real(),
                                                   fit_e.secondary_sigma, t, !threshold.e_above);
    out.eps_prep_mix = 0.5 * (mix_g + mix_e);
    return out;
}

double fitted_snr(const MixtureFit& fit_g, const MixtureFit& fit_e) {
    check_fit(fit_g);
    check_fit(fit_e);
    return std::abs(fit_e.dominant_mean.real() - fit_g.dominant_mean.real()) /
           (fit_g.dominant_sigma + fit_e.dominant_sigma);
}

double empirical_snr(std::span<const double> i_g, std::span<const double> i_e) {
    if (i_g.size() < 2 || i_e.size() < 2) {
        throw ParameterError("empirical SNR needs at least two shots per state");
    }
    const double mg = mean_of(i_g);
    const double me = mean_of(i_e);
    const double sg = std::sqrt(variance_of(i_g, mg));
    const double se = std::sqrt(variance_of(i_e, me));
    if (!(sg + se > 0.0)) {
        throw DegenerateInputError("empirical SNR undefined for zero spread");
    }
    return std::abs(me - mg) / (sg + se);
}

double empirical_snr(const ShotBatch& batch) {
    const auto g = batch.i_of(Level::g);
    const auto e = batch.i_of(Level::e);
    return empirical_snr(g, e);
}

std::optional<double> time_to_threshold(std::span<const double> tau_grid,
                                        std::span<const double> eps, double target_eps) {
    if (!(target_eps > 0.0 && target_eps < 0.5)) {
        throw ParameterError("target eps must lie in (0, 0.5)");
    }
    if (tau_grid.size() != eps.size() || tau_grid.empty()) {
        throw ParameterError("tau grid and eps values must be non-empty and equally long");
    }
    for (std::size_t k = 1; k < tau_grid.size(); ++k) {
        if (!(tau_grid[k] > tau_grid[k - 1])) {
            throw ParameterError("tau grid must be strictly ascending");
        }
    }
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        if (eps[k] <= target_eps) {
            return tau_grid[k];
        }
    }
    return std::nullopt;
}

double efficiency_from_noise(double n_n) {
    if (!(n_n > 0.0)) {
        throw ParameterError("n_n must be positive");
    }
    return 1.0 / n_n;
}

double noise_temperature(double n_n, double omega_r_ghz) {
    if (!(n_n > 0.0) || !(omega_r_ghz > 0.0)) {
        throw ParameterError("n_n and omega_r must be positive");
    }
    return n_n * kPlanck * omega_r_ghz * 1e9 / kBoltzmann;
}

EfficiencyFit efficiency_fit(std::span<const double> sqrt_n_bar, std::span<const double> snr,
                             const CavityParams& cavity, const ReadoutConfig& cfg) {
    if (sqrt_n_bar.size() != snr.size()) {
        throw ParameterError("efficiency fit inputs differ in length");
    }
    if (sqrt_n_bar.size() < 4) {
        throw ParameterError("efficiency fit needs at least 4 points");
    }
    cavity.validate();
    cfg.validate();
    const std::size_t n = snr.size();
    const double mx = mean_of(sqrt_n_bar);
    const double my = mean_of(snr);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (sqrt_n_bar[k] - mx) * (sqrt_n_bar[k] - mx);
        sxy += (sqrt_n_bar[k] - mx) * (snr[k] - my);
        syy += (snr[k] - my) * (snr[k] - my);
    }
    if (!(sxx > 0.0)) {
        throw FitError("efficiency fit needs distinct photon numbers");
    }
    EfficiencyFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    if (!(out.slope > 0.0)) {
        throw FitError("SNR slope against sqrt(n_bar) is not positive");
    }
    double ssr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = snr[k] - out.intercept - out.slope * sqrt_n_bar[k];
        ssr += r * r;
    }
    const double s2 = ssr / static_cast<double>(n - 2);
    out.slope_err = std::sqrt(s2 / sxx);
    out.intercept_err =
        std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    out.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;

    const double phi = 0.5 * pointer_separation_angle(cavity, cfg.drive_freq_ghz);
    const double kappa = angular_from_mhz(cavity.kappa_total_mhz());
    const double s = std::sin(phi);
    if (!(s > 0.0)) {
        throw FitError("pointer states do not separate at the readout frequency");
    }
    out.n_n = 2.0 * kappa * cfg.tau_int * cfg.f_linear() * s * s / (out.slope * out.slope);
    out.eta = efficiency_from_noise(out.n_n);
    out.t_n_eff = noise_temperature(out.n_n, cavity.omega_r_ghz);
    return out;
}

std::vector<BlobMeans> blob_mean_trajectory(std::span<const ShotBatch> batches) {
    std::vector<BlobMeans> out;
    out.reserve(batches.size());
    for (const auto& batch : batches) {
        const auto g = batch.iq_of(Level::g);
        const auto e = batch.iq_of(Level::e);
        if (g.size() < 2 || e.size() < 2) {
            throw ParameterError("blob means need at least two shots per state");
        }
        BlobMeans b;
        b.mean_g = std::accumulate(g.begin(), g.end(), std::complex<double>{}) /
                   static_cast<double>(g.size());
        b.mean_e = std::accumulate(e.begin(), e.end(), std::complex<double>{}) /
                   static_cast<double>(e.size());
        double ss = 0.0;
        for (const auto& z : g) {
            ss += std::norm(z - b.mean_g);
        }
        for (const auto& z : e) {
            ss += std::norm(z - b.mean_e);
        }
        b.sigma = std::sqrt(ss / (2.0 * static_cast<double>(g.size() + e.size() - 2)));
        out.push_back(b);
    }
    return out;
}

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 5) {
        throw ParameterError("Lorentzian fit needs at least 5 equally long x/y points");
    }
    const std::size_t n = x.size();
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double base = *std::min_element(y.begin(), y.end());
    const double amp = y[peak] - base;
    const double half = base + 0.5 * amp;
    std::size_t left = peak;
    std::size_t right = peak;
    while (left > 0 && y[left - 1] >= half) {
        --left;
    }
    while (right + 1 < n && y[right + 1] >= half) {
        ++right;
    }
    const double span_x = std::abs(x.back() - x.front());
    const double dx = span_x / static_cast<double>(n - 1);
    const double width = std::max(0.5 * std::abs(x[right] - x[left]), dx);
    const double scale = std::max(amp, 1e-12);

    const ResidualFunction residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const double u = (x[k] - p[1]) / p[2];
            r[static_cast<Eigen::Index>(k)] = (p[3] + p[0] / (1.0 + u * u) - y[k]) / scale;
        }
        return r;
    };
    Eigen::VectorXd p0(4);
    p0 << amp, x[peak], width, base;
    const LmResult res = levenberg_marquardt(residual, p0);
    if (!res.params.allFinite()) {
        std::ostringstream msg;
        msg << "Lorentzian fit diverged; residual norm " << std::sqrt(res.cost) * scale;
        throw FitError(msg.str());
    }
    LorentzianFit out;
    out.amplitude = res.params[0];
    out.center = res.params[1];
    out.hwhm = std::abs(res.params[2]);
    out.offset = res.params[3];
    out.rms_residual = std::sqrt(res.cost / static_cast<double>(n)) * scale;
    return out;
}

ExponentialFit fit_exponential_decay(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4) {
        throw ParameterError("exponential fit needs at least 4 equally long x/y points");
    }
    const std::size_t n = x.size();
    const double offset0 = y.back();
    const double amp0 = y.front() - offset0;
    const double span_x = x.back() - x.front();
    if (!(span_x > 0.0)) {
        throw ParameterError("exponential fit needs an increasing x range");
    }
    double rate0 = 3.0 / span_x;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(y[k] - offset0) <= std::abs(amp0) / std::exp(1.0) && x[k] > x.front()) {
            rate0 = 1.0 / (x[k] - x.front());
            break;
        }
    }
    const double scale = std::max(std::abs(amp0), 1e-12);
    const ResidualFunction residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        const double rate = std::exp(p[1]);
        for (std::size_t k = 0; k < n; ++k) {
            r[static_cast<Eigen::Index>(k)] =
                (p[2] + p[0] * std::exp(-rate * (x[k] - x.front())) - y[k]) / scale;
        }
        return r;
    };
    Eigen::VectorXd p0(3);
    p0 << amp0, std::log(rate0), offset0;
    const LmResult res = levenberg_marquardt(residual, p0);
    if (!res.params.allFinite()) {
        throw FitError("exponential fit diverged");
    }
    ExponentialFit out;
    out.rate = std::exp(res.params[1]);
    out.amplitude = res.params[0] * std::exp(out.rate * x.front());
    out.offset = res.params[2];
    out.rms_residual = std::sqrt(res.cost / static_cast<double>(n)) * scale;
    return out;
}

namespace {

std::vector<double> ridge_shifts(const CkpMap& map) {
    const auto& qf = map.grid.qubit_freqs_ghz;
    std::vector<double> x(qf.size());
    for (std::size_t k = 0; k < qf.size(); ++k) {
        x[k] = (qf[k] - map.qubit_freq_ghz) * 1e3;
    }
    std::vector<double> out;
    std::vector<double> row(qf.size());
    for (std::size_t r = 0; r < map.grid.resonator_freqs_ghz.size(); ++r) {
        for (std::size_t q = 0; q < qf.size(); ++q) {
            row[q] = map.at(r, q);
        }
        out.push_back(fit_lorentzian(x, row).center);
    }
    return out;
}

}  // namespace

CkpFit fit_ckp(const CkpMap& map_g, const CkpMap& map_e) {
    for (const CkpMap* m : {&map_g, &map_e}) {
        if (m->signal.size() !=
            m->grid.resonator_freqs_ghz.size() * m->grid.qubit_freqs_ghz.size()) {
            throw ParameterError("CKP map size disagrees with its grid");
        }
    }
    CkpFit out;
    out.shift_g = ridge_shifts(map_g);
    out.shift_e = ridge_shifts(map_e);
    const auto& rg = map_g.grid.resonator_freqs_ghz;
    const auto& re = map_e.grid.resonator_freqs_ghz;
    const double ref = 0.5 * (rg.front() + rg.back());
    auto offsets = [&](const std::vector<double>& f) {
        std::vector<double> x(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            x[k] = (f[k] - ref) * 1e3;
        }
        return x;
    };
    out.ridge_g = fit_lorentzian(offsets(rg), out.shift_g);
    out.ridge_e = fit_lorentzian(offsets(re), out.shift_e);
    const double span = (rg.back() - rg.front()) * 1e3;
    const double step = span / static_cast<double>(std::max<std::size_t>(rg.size() - 1, 1));
    for (const LorentzianFit* f : {&out.ridge_g, &out.ridge_e}) {
        const bool resolved = std::abs(f->amplitude) > 5.0 * f->rms_residual &&
                              std::abs(f->hwhm) > step && std::abs(f->center) < 0.5 * span;
        if (!resolved) {
            throw FitError("no Stark-shift ridge resolved in the CKP map");
        }
    }
    out.chi_ge_mhz = out.ridge_e.center - out.ridge_g.center;
    out.peak_shift_mhz = 0.5 * (out.ridge_g.amplitude + out.ridge_e.amplitude);
    out.n_bar_peak = out.chi_ge_mhz != 0.0 ? out.peak_shift_mhz / out.chi_ge_mhz
                                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

Histogram histogram(std::span<const double> i_g, std::span<const double> i_e, std::size_t bins) {
    if (bins < 1) {
        throw ParameterError("histogram needs at least one bin");
    }
    if (i_g.empty() && i_e.empty()) {
        throw ParameterError("histogram needs data");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto span : {i_g, i_e}) {
        for (double v : span) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == lo) {
        hi = lo + 1.0;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    Histogram h;
    h.centers.resize(bins);
    h.count_g.assign(bins, 0);
    h.count_e.assign(bins, 0);
    for (std::size_t b = 0; b < bins; ++b) {
        h.centers[b] = lo + (static_cast<double>(b) + 0.5) * width;
    }
    auto bin_of = [&](double v) {
        const auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double v : i_g) {
        ++h.count_g[bin_of(v)];
    }
    for (double v : i_e) {
        ++h.count_e[bin_of(v)];
    }
    return h;
}

FidelityReport analyze_batch(const ShotBatch& batch, const MixtureOptions& options) {
    FidelityReport report;
    report.fit_g = fit_mixture(batch, Level::g, options);
    report.fit_e = fit_mixture(batch, Level::e, options);
    report.threshold = optimal_threshold(report.fit_g, report.fit_e);
    report.assignment =
        assignment_fidelity(report.fit_g.samples, report.fit_e.samples, report.threshold);
    const auto dec = error_decomposition(report.fit_g, report.fit_e, report.threshold);
    report.eps_snr = dec.eps_snr;
    report.eps_prep_mix = dec.eps_prep_mix;
    report.snr = fitted_snr(report.fit_g, report.fit_e);
    return report;
}

}  // namespace fluxshot
