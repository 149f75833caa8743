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

#include "fluxshot/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fluxshot/batch_io.h"
#include "fluxshot/constants.h"
#include "fluxshot/dynamics.h"
#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

OrderedJson interval_json(const Interval& i) { return OrderedJson::array({i.lo, i.hi}); }

OrderedJson complex_json(std::complex<double> z) {
    return OrderedJson::array({z.real(), z.imag()});
}

OrderedJson fit_json(const MixtureFit& f) {
    OrderedJson j;
    j["dominant_mean"] = complex_json(f.dominant_mean);
    j["secondary_mean"] = complex_json(f.secondary_mean);
    j["dominant_sigma"] = f.dominant_sigma;
    j["secondary_sigma"] = f.secondary_sigma;
    j["dominant_weight"] = f.dominant_weight;
    j["secondary_weight"] = f.secondary_weight();
    j["log_likelihood"] = f.log_likelihood;
    j["single_log_likelihood"] = f.single_log_likelihood;
    j["single_component"] = f.single_component;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    return j;
}

OrderedJson readout_json(const ReadoutConfig& r) {
    OrderedJson j;
    j["drive_freq_ghz"] = r.drive_freq_ghz;
    j["n_bar"] = r.n_bar;
    j["tau_int_us"] = r.tau_int * 1e6;
    j["pulse_len_us"] = r.pulse_len * 1e6;
    j["f_factor_db"] = r.f_factor_db;
    j["demod"] = r.demod == Demod::matched ? "matched" : "boxcar";
    return j;
}

OrderedJson noise_json(const NoiseConfig& n, double omega_r_ghz) {
    OrderedJson j;
    j["n_n"] = n.n_n;
    j["jpa_on"] = n.jpa_on;
    j["eta"] = efficiency_from_noise(n.n_n);
    j["t_n_eff_k"] = noise_temperature(n.n_n, omega_r_ghz);
    return j;
}

OrderedJson header_json(const ScenarioConfig& cfg) {
    OrderedJson j;
    j["experiment"] = cfg.experiment_name;
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.seed;
    return j;
}

SynthesisOptions synthesis_options(const ShotSettings& s) {
    SynthesisOptions o;
    o.prep_error = s.prep_error;
    o.jumps = s.jumps;
    o.reference_n_n = 37.5;
    return o;
}

ReadoutConfig with_tau(const ReadoutConfig& base, double tau) {
    ReadoutConfig r = base;
    if (tau == base.tau_int) {
        return r;
    }
    r.pulse_len = tau + (base.pulse_len - base.tau_int);
    r.tau_int = tau;
    return r;
}

std::vector<OutputFile> run_single_shot(const ScenarioConfig& cfg, const SingleShotExperiment& e,
                                        const RunOptions& options) {
    const ShotSettings settings = shot_settings(cfg);
    const SingleShotPoint point = single_shot_point(cfg, cfg.readout, settings);
    std::vector<OutputFile> files;
    files.push_back({"fidelity_report.json", dump_fixed(fidelity_report_json(cfg, point, settings))});
    const Histogram h = histogram(point.report.fit_g.samples, point.report.fit_e.samples,
                                  e.histogram_bins);
    CsvTable table({"bin_center", "count_g", "count_e"});
    for (std::size_t b = 0; b < h.centers.size(); ++b) {
        table.cell(h.centers[b]);
        table.cell_int(static_cast<long long>(h.count_g[b]));
        table.cell_int(static_cast<long long>(h.count_e[b]));
        table.end_row();
    }
    files.push_back({"histogram.csv", table.str()});
    if (e.save_shots) {
        files.push_back({"shots.csv", batch_csv(point.batch)});
        files.push_back({"shots.json", batch_sidecar(point.batch)});
    }
    if (options.svg) {
        std::vector<double> cg(h.count_g.begin(), h.count_g.end());
        std::vector<double> ce(h.count_e.begin(), h.count_e.end());
        files.push_back({"histogram.svg",
                         svg_plot("Single-shot histogram (" + amplifier_name(e.amplifier) + ")",
                                  "I (reference noise units)", "counts",
                                  {{"prepared g", h.centers, cg}, {"prepared e", h.centers, ce},
                                   {"threshold",
                                    {point.report.threshold.value, point.report.threshold.value},
                                    {0.0, std::max(*std::max_element(cg.begin(), cg.end()),
                                                   *std::max_element(ce.begin(), ce.end()))}}})});
    }
    return files;
}

std::vector<OutputFile> run_qnd(const ScenarioConfig& cfg, const QndExperiment& e,
                                const RunOptions& options) {
    const RateModel rates = cfg.rate_model();
    const NoiseConfig& noise = cfg.noise(e.amplifier);
    SynthesisOptions so;
    so.prep_error = e.prep_error;
    so.jumps = e.jumps;
    const std::vector<Preparation> preps{Preparation::g, Preparation::e, Preparation::plus};
    const QndRecords rec =
        synthesize_qnd(preps, cfg.cavity, cfg.readout, noise, rates, cfg.n_shots, e.gap, cfg.seed, so);
    const std::size_t n = cfg.n_shots;
    const std::vector<double> m1_g(rec.m1_i.begin(), rec.m1_i.begin() + static_cast<long>(n));
    const std::vector<double> m1_e(rec.m1_i.begin() + static_cast<long>(n),
                                   rec.m1_i.begin() + static_cast<long>(2 * n));
    const Threshold thr = optimal_threshold(m1_g, m1_e);
    const Assignment m1_assign = assignment_fidelity(m1_g, m1_e, thr);
    std::vector<int> o1(rec.m1_i.size());
    std::vector<int> o2(rec.m1_i.size());
    CsvTable table({"preparation", "m1_i", "m1_q", "m2_i", "m2_q", "m1", "m2"});
    static const char* kPrepNames[] = {"g", "e", "plus"};
    for (std::size_t k = 0; k < rec.m1_i.size(); ++k) {
        o1[k] = classify(rec.m1_i[k], thr);
        o2[k] = classify(rec.m2_i[k], thr);
        table.cell(kPrepNames[static_cast<int>(rec.prepared[k])]);
        table.cell(format_shortest(rec.m1_i[k]));
        table.cell(format_shortest(rec.m1_q[k]));
        table.cell(format_shortest(rec.m2_i[k]));
        table.cell(format_shortest(rec.m2_q[k]));
        table.cell_int(o1[k]);
        table.cell_int(o2[k]);
        table.end_row();
    }
    const QndResult q = qnd_fidelity(o1, o2);

    // Population transfer between the window midpoints of M1 and M2.
    const ReadoutGeometry geo = make_geometry(cfg.cavity, cfg.readout, 37.5);
    const std::vector<DriveSegment> drive{{cfg.readout.pulse_len, geo.drive_amp},
                                          {e.gap, 0.0},
                                          {cfg.readout.pulse_len, geo.drive_amp}};
    const PhotonSchedule photons =
        PhotonSchedule::from_drive(cfg.cavity, cfg.readout.drive_freq_ghz, drive);
    const double mid1 = cfg.readout.pulse_len - 0.5 * cfg.readout.tau_int;
    const double mid2 = mid1 + cfg.readout.pulse_len + e.gap;
    Eigen::VectorXd pg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rates.num_levels()));
    Eigen::VectorXd pe = pg;
    pg[0] = 1.0;
    pe[1] = 1.0;
    const Eigen::VectorXd fg = solve_master_equation(rates, photons, pg, mid2 - mid1, mid1);
    const Eigen::VectorXd fe = solve_master_equation(rates, photons, pe, mid2 - mid1, mid1);

    OrderedJson j = header_json(cfg);
    j["amplifier"] = amplifier_name(e.amplifier);
    j["n_per_preparation"] = n;
    j["gap_us"] = e.gap * 1e6;
    j["readout"] = readout_json(cfg.readout);
    j["threshold"] = thr.value;
    j["e_above"] = thr.e_above;
    j["m1_assignment_fidelity"] = m1_assign.fidelity;
    j["f_q"] = q.f_q;
    j["p00"] = q.p00;
    j["p11"] = q.p11;
    j["p00_ci"] = interval_json(q.p00_ci);
    j["p11_ci"] = interval_json(q.p11_ci);
    j["n_m1_0"] = q.n0;
    j["n_m1_1"] = q.n1;
    j["heralded_fidelity"] = q.heralded_fidelity;
    OrderedJson pred;
    pred["p_stay_g"] = fg[0];
    pred["p_stay_e"] = fe[1];
    pred["f_q"] = 0.5 * (fg[0] + fe[1]);
    j["markov_prediction"] = pred;

    std::vector<OutputFile> files;
    files.push_back({"qnd_report.json", dump_fixed(j)});
    files.push_back({"qnd_records.csv", table.str()});
    if (options.svg) {
        std::vector<double> m2_given0;
        std::vector<double> m2_given1;
        for (std::size_t k = 0; k < o1.size(); ++k) {
            (o1[k] == 0 ? m2_given0 : m2_given1).push_back(rec.m2_i[k]);
        }
        const Histogram h = histogram(m2_given0, m2_given1, 80);
        std::vector<double> c0(h.count_g.begin(), h.count_g.end());
        std::vector<double> c1(h.count_e.begin(), h.count_e.end());
        files.push_back({"qnd_histograms.svg",
                         svg_plot("M2 conditioned on M1", "I (reference noise units)", "counts",
                                  {{"M1 = 0", h.centers, c0}, {"M1 = 1", h.centers, c1}})});
    }
    return files;
}

struct SweepRow {
    double axis = 0.0;
    ReadoutConfig readout;
    double fidelity = kNaN;
    double eps_snr = kNaN;
    double eps_prep_mix = kNaN;
    double snr = kNaN;
    double threshold = kNaN;
    BlobMeans blobs;
    bool ok = false;
};

SweepRow sweep_row(const ScenarioConfig& cfg, const ReadoutConfig& readout,
                   const ShotSettings& settings, double axis) {
    SweepRow row;
    row.axis = axis;
    row.readout = readout;
    const SingleShotPoint p = single_shot_point(cfg, readout, settings);
    row.fidelity = p.report.assignment.fidelity;
    row.eps_snr = p.report.eps_snr;
    row.eps_prep_mix = p.report.eps_prep_mix;
    row.snr = p.report.snr;
    row.threshold = p.report.threshold.value;
    const std::vector<ShotBatch> one{p.batch};
    row.blobs = blob_mean_trajectory(one)[0];
    row.ok = true;
    return row;
}

std::vector<OutputFile> run_power_sweep(const ScenarioConfig& cfg, const PowerSweepExperiment& e,
                                        const RunOptions& options) {
    const ShotSettings settings = shot_settings(cfg);
    CsvTable table({"drive_amp", "n_bar", "tau_int_us", "fidelity", "total_error", "eps_snr",
                    "eps_prep_mix", "snr", "threshold"});
    CsvTable ttt({"drive_amp", "n_bar", "target_eps", "tau_int_us", "reachable"});
    CsvTable blobs({"drive_amp", "n_bar", "tau_int_us", "fidelity", "mean_g_i", "mean_g_q",
                    "mean_e_i", "mean_e_q", "sigma", "separation"});
    std::vector<double> n_bars;
    std::vector<double> best_error;
    std::vector<double> best_eps;
    std::vector<double> separations;
    std::vector<std::vector<double>> ttt_series(e.targets.size());
    for (double a : e.drive_amps) {
        ReadoutConfig base = cfg.readout;
        base.n_bar = cfg.readout.n_bar * a * a;
        std::vector<double> eps;
        SweepRow best;
        std::optional<SweepRow> at_config_tau;
        for (double tau : e.tau_grid) {
            const SweepRow row = sweep_row(cfg, with_tau(base, tau), settings, a);
            if (tau == cfg.readout.tau_int) {
                at_config_tau = row;
            }
            table.cell(a).cell(base.n_bar).cell(tau * 1e6).cell(row.fidelity)
                .cell(1.0 - row.fidelity).cell(row.eps_snr).cell(row.eps_prep_mix)
                .cell(row.snr).cell(row.threshold);
            table.end_row();
            eps.push_back(row.eps_snr);
            if (!best.ok || row.fidelity > best.fidelity) {
                best = row;
            }
        }
        for (std::size_t t = 0; t < e.targets.size(); ++t) {
            const auto tau = time_to_threshold(e.tau_grid, eps, e.targets[t]);
            ttt.cell(a).cell(base.n_bar).cell(e.targets[t]).cell(tau ? *tau * 1e6 : kNaN)
                .cell(tau ? "true" : "false");
            ttt.end_row();
            ttt_series[t].push_back(tau ? *tau * 1e6 : kNaN);
        }
        if (!at_config_tau) {
            at_config_tau = sweep_row(cfg, with_tau(base, cfg.readout.tau_int), settings, a);
        }
        const BlobMeans& bm = at_config_tau->blobs;
        blobs.cell(a).cell(base.n_bar).cell(cfg.readout.tau_int * 1e6)
            .cell(at_config_tau->fidelity).cell(bm.mean_g.real()).cell(bm.mean_g.imag())
            .cell(bm.mean_e.real()).cell(bm.mean_e.imag()).cell(bm.sigma).cell(bm.separation());
        blobs.end_row();
        n_bars.push_back(base.n_bar);
        best_error.push_back(1.0 - best.fidelity);
        best_eps.push_back(best.eps_snr);
        separations.push_back(bm.separation());
    }
    const auto best_it = std::min_element(best_error.begin(), best_error.end());
    const auto best_idx = static_cast<std::size_t>(best_it - best_error.begin());
    OrderedJson j = header_json(cfg);
    j["amplifier"] = amplifier_name(e.amplifier);
    j["optimal_drive_amp"] = e.drive_amps[best_idx];
    j["optimal_n_bar"] = n_bars[best_idx];
    j["optimal_total_error"] = *best_it;
    j["interior_minimum"] = best_idx > 0 && best_idx + 1 < best_error.size();
    const auto peak_sep = std::max_element(separations.begin(), separations.end());
    j["separation_peak_n_bar"] = n_bars[static_cast<std::size_t>(peak_sep - separations.begin())];

    std::vector<OutputFile> files;
    files.push_back({"power_sweep.csv", table.str()});
    files.push_back({"time_to_threshold.csv", ttt.str()});
    files.push_back({"blob_means.csv", blobs.str()});
    files.push_back({"power_sweep_summary.json", dump_fixed(j)});
    if (options.svg) {
        files.push_back({"power_sweep.svg",
                         svg_plot("Errors at the best integration time", "n_bar", "error",
                                  {{"1 - F", n_bars, best_error}, {"eps_snr", n_bars, best_eps}},
                                  true)});
        std::vector<PlotSeries> s;
        for (std::size_t t = 0; t < e.targets.size(); ++t) {
            s.push_back({"eps < " + format_fixed(e.targets[t], 4), n_bars, ttt_series[t], true});
        }
        files.push_back({"time_to_threshold.svg",
                         svg_plot("Integration time to reach eps_snr target", "n_bar",
                                  "tau_int (us)", s)});
        files.push_back({"blob_separation.svg",
                         svg_plot("Blob-mean separation", "n_bar", "|mean_e - mean_g|",
                                  {{"separation", n_bars, separations}})});
    }
    return files;
}

std::vector<OutputFile> run_time_sweep(const ScenarioConfig& cfg, const TimeSweepExperiment& e,
                                       const RunOptions& options) {
    const ShotSettings settings = shot_settings(cfg);
    CsvTable table({"tau_int_us", "n_bar", "fidelity", "total_error", "eps_snr", "eps_prep_mix",
                    "snr", "threshold"});
    std::vector<double> eps;
    std::vector<double> taus_us;
    std::vector<double> errors;
    for (double tau : e.tau_grid) {
        const SweepRow row = sweep_row(cfg, with_tau(cfg.readout, tau), settings, tau);
        table.cell(tau * 1e6).cell(cfg.readout.n_bar).cell(row.fidelity).cell(1.0 - row.fidelity)
            .cell(row.eps_snr).cell(row.eps_prep_mix).cell(row.snr).cell(row.threshold);
        table.end_row();
        eps.push_back(row.eps_snr);
        taus_us.push_back(tau * 1e6);
        errors.push_back(1.0 - row.fidelity);
    }
    OrderedJson j = header_json(cfg);
    j["amplifier"] = amplifier_name(e.amplifier);
    j["n_bar"] = cfg.readout.n_bar;
    OrderedJson targets = OrderedJson::array();
    for (double t : e.targets) {
        const auto tau = time_to_threshold(e.tau_grid, eps, t);
        OrderedJson entry;
        entry["target_eps"] = t;
        entry["tau_int_us"] = tau ? OrderedJson(*tau * 1e6) : OrderedJson(nullptr);
        entry["reachable"] = tau.has_value();
        targets.push_back(entry);
    }
    j["time_to_threshold"] = targets;
    std::vector<OutputFile> files;
    files.push_back({"time_sweep.csv", table.str()});
    files.push_back({"time_sweep_summary.json", dump_fixed(j)});
    if (options.svg) {
        files.push_back({"time_sweep.svg",
                         svg_plot("Errors against integration time", "tau_int (us)", "error",
                                  {{"1 - F", taus_us, errors}, {"eps_snr", taus_us, eps}}, true)});
    }
    return files;
}

std::vector<OutputFile> run_backaction(const ScenarioConfig& cfg, const BackactionExperiment& e,
                                       const RunOptions& options) {
    const RateModel rates = cfg.rate_model();
    BackactionOptions bo;
    bo.gap = e.gap;
    bo.seed = cfg.seed;
    CsvTable table({"a_r", "tau_leak_us", "signal"});
    OrderedJson fits = OrderedJson::array();
    std::vector<PlotSeries> series;
    std::vector<double> tau_us;
    for (double t : e.tau_leak) {
        tau_us.push_back(t * 1e6);
    }
    for (double a : e.a_r) {
        const auto signal = backaction_experiment(e.prepared, a, e.tau_leak, rates, cfg.cavity,
                                                  cfg.readout, e.n_traj, bo);
        for (std::size_t k = 0; k < signal.size(); ++k) {
            table.cell(a).cell(tau_us[k]).cell(signal[k]);
            table.end_row();
        }
        OrderedJson f;
        f["a_r"] = a;
        f["n_bar_leak"] = cfg.readout.n_bar * a * a;
        if (signal.size() >= 4) {
            const ExponentialFit fit = fit_exponential_decay(tau_us, signal);
            f["decay_rate_per_us"] = fit.rate;
            f["saturation"] = fit.offset;
            f["amplitude"] = fit.amplitude;
            f["rms_residual"] = fit.rms_residual;
        }
        f["final_signal"] = signal.back();
        fits.push_back(f);
        series.push_back({"a_r = " + format_fixed(a, 2), tau_us, signal});
    }
    OrderedJson j = header_json(cfg);
    j["prepared"] = std::string(level_name(e.prepared));
    j["n_traj"] = e.n_traj;
    j["readout"] = readout_json(cfg.readout);
    j["equilibrium_p_e"] = cfg.temperature > 0.0
                               ? thermal_population(cfg.qubit_freq_ghz(), cfg.temperature)
                               : 0.0;
    j["fits"] = fits;
    std::vector<OutputFile> files;
    files.push_back({"backaction.csv", table.str()});
    files.push_back({"backaction_fit.json", dump_fixed(j)});
    if (options.svg) {
        files.push_back({"backaction.svg",
                         svg_plot("Ensemble signal after leaked photons", "tau_leak (us)",
                                  "normalized signal (g = 0, e = 1)", series)});
    }
    return files;
}

std::vector<OutputFile> run_ckp(const ScenarioConfig& cfg, const CkpExperiment& e,
                                const RunOptions& options) {
    const double qf = cfg.qubit_freq_ghz();
    const double f_g = cfg.cavity.omega_r_ghz + cfg.cavity.chi(Level::g) * 1e-3;
    const double unit = steady_photon_number(cfg.cavity, Level::g, 1.0, f_g);
    const double drive_amp = std::sqrt(e.n_bar_peak / unit);
    CkpGrid grid;
    for (std::size_t k = 0; k < e.resonator_points; ++k) {
        grid.resonator_freqs_ghz.push_back(
            cfg.cavity.omega_r_ghz +
            1e-3 * e.resonator_span_mhz *
                (static_cast<double>(k) / static_cast<double>(e.resonator_points - 1) - 0.5));
    }
    for (std::size_t k = 0; k < e.qubit_points; ++k) {
        grid.qubit_freqs_ghz.push_back(
            qf + 1e-3 * (e.qubit_offset_min_mhz +
                         (e.qubit_offset_max_mhz - e.qubit_offset_min_mhz) *
                             static_cast<double>(k) / static_cast<double>(e.qubit_points - 1)));
    }
    CkpOptions co;
    co.qubit_linewidth_mhz = e.linewidth_mhz;
    co.noise = e.noise;
    co.seed = cfg.seed;
    const CkpMap map_g = ckp_map(cfg.cavity, qf, drive_amp, grid, Level::g, co);
    const CkpMap map_e = ckp_map(cfg.cavity, qf, drive_amp, grid, Level::e, co);
    const CkpFit fit = fit_ckp(map_g, map_e);

    CsvTable maps({"resonator_ghz", "qubit_ghz", "signal_g", "signal_e"});
    for (std::size_t r = 0; r < grid.resonator_freqs_ghz.size(); ++r) {
        for (std::size_t q = 0; q < grid.qubit_freqs_ghz.size(); ++q) {
            maps.cell(grid.resonator_freqs_ghz[r], 7).cell(grid.qubit_freqs_ghz[q], 7)
                .cell(map_g.at(r, q)).cell(map_e.at(r, q));
            maps.end_row();
        }
    }
    CsvTable ridge({"resonator_ghz", "shift_g_mhz", "shift_e_mhz"});
    std::vector<double> fr_mhz;
    for (std::size_t r = 0; r < grid.resonator_freqs_ghz.size(); ++r) {
        ridge.cell(grid.resonator_freqs_ghz[r], 7).cell(fit.shift_g[r]).cell(fit.shift_e[r]);
        ridge.end_row();
        fr_mhz.push_back((grid.resonator_freqs_ghz[r] - cfg.cavity.omega_r_ghz) * 1e3);
    }
    auto lorentz_json = [](const LorentzianFit& l, double ref_mhz) {
        OrderedJson j;
        j["center_offset_mhz"] = l.center + ref_mhz;
        j["peak_shift_mhz"] = l.amplitude;
        j["hwhm_mhz"] = l.hwhm;
        j["offset_mhz"] = l.offset;
        j["rms_residual_mhz"] = l.rms_residual;
        return j;
    };
    const double ref_mhz =
        (0.5 * (grid.resonator_freqs_ghz.front() + grid.resonator_freqs_ghz.back()) -
         cfg.cavity.omega_r_ghz) *
        1e3;
    OrderedJson j = header_json(cfg);
    j["qubit_freq_ghz"] = qf;
    j["drive_amp"] = drive_amp;
    j["true_chi_ge_mhz"] = cfg.cavity.chi_ge();
    j["true_n_bar_peak"] = e.n_bar_peak;
    j["chi_ge_mhz"] = fit.chi_ge_mhz;
    j["n_bar_peak"] = fit.n_bar_peak;
    j["peak_shift_mhz"] = fit.peak_shift_mhz;
    j["ridge_g"] = lorentz_json(fit.ridge_g, ref_mhz);
    j["ridge_e"] = lorentz_json(fit.ridge_e, ref_mhz);
    std::vector<OutputFile> files;
    files.push_back({"ckp_report.json", dump_fixed(j)});
    files.push_back({"ckp_maps.csv", maps.str()});
    files.push_back({"ckp_ridge.csv", ridge.str()});
    if (options.svg) {
        files.push_back({"ckp_ridge.svg",
                         svg_plot("Stark-shift ridge", "resonator drive - omega_r (MHz)",
                                  "qubit shift (MHz)",
                                  {{"prepared g", fr_mhz, fit.shift_g, true},
                                   {"prepared e", fr_mhz, fit.shift_e, true}})});
    }
    return files;
}

std::vector<OutputFile> run_reset(const ScenarioConfig& cfg, const ResetExperiment& e,
                                  const RunOptions& options) {
    const double qf = cfg.qubit_freq_ghz();
    const RateModel thermal =
        RateModel::thermal_qubit(qf, cfg.coherence.t1, cfg.temperature, 2);
    ResetConfig rc;
    rc.sideband_rate = e.sideband_rate;
    rc.duration = e.duration;
    rc.cavity_kappa = e.cavity_kappa.value_or(angular_from_mhz(cfg.cavity.kappa_total_mhz()));
    rc.rethermalization_rate =
        e.rethermalization_rate.value_or(thermal.base_rate(Level::g, Level::e));
    rc.qubit_decay_rate = e.qubit_decay_rate.value_or(thermal.base_rate(Level::e, Level::g));
    const double p0 = thermal_population(qf, cfg.temperature);
    const Eigen::Vector3d pops = reset_populations(p0, rc);
    const double residual = pops[0];

    CsvTable curve({"duration_us", "residual_p_e"});
    std::vector<double> ts;
    std::vector<double> ps;
    for (int k = 0; k <= 100; ++k) {
        ResetConfig c = rc;
        c.duration = e.duration * k / 100.0;
        const double p = reset_simulate(p0, c);
        curve.cell(c.duration * 1e6).cell(p);
        curve.end_row();
        ts.push_back(c.duration * 1e6);
        ps.push_back(p);
    }
    OrderedJson j = header_json(cfg);
    j["qubit_freq_ghz"] = qf;
    j["sideband_frequency_ghz"] = sideband_frequency(cfg.cavity.omega_r_ghz, qf);
    j["temperature_mk"] = cfg.temperature * 1e3;
    j["initial_p_e"] = p0;
    j["initial_effective_temperature_mk"] = effective_temperature(p0, qf) * 1e3;
    j["residual_p_e"] = residual;
    j["final_effective_temperature_mk"] =
        residual > 0.0 && residual < 0.5 ? OrderedJson(effective_temperature(residual, qf) * 1e3)
                                         : OrderedJson(nullptr);
    OrderedJson rates;
    rates["sideband_rate_per_s"] = rc.sideband_rate;
    rates["duration_us"] = rc.duration * 1e6;
    rates["cavity_kappa_per_s"] = rc.cavity_kappa;
    rates["rethermalization_rate_per_s"] = rc.rethermalization_rate;
    rates["qubit_decay_rate_per_s"] = rc.qubit_decay_rate;
    j["reset"] = rates;
    OrderedJson p;
    p["e0"] = pops[0];
    p["g1"] = pops[1];
    p["g0"] = pops[2];
    j["final_populations"] = p;
    std::vector<OutputFile> files;
    files.push_back({"reset_report.json", dump_fixed(j)});
    files.push_back({"reset_curve.csv", curve.str()});
    if (options.svg) {
        files.push_back({"reset_curve.svg", svg_plot("Sideband reset", "duration (us)",
                                                     "excited population", {{"p_e", ts, ps}})});
    }
    return files;
}

std::vector<OutputFile> run_efficiency(const ScenarioConfig& cfg, const EfficiencyExperiment& e,
                                       const RunOptions& options) {
    const RateModel rates = cfg.rate_model();
    NoiseConfig noise = cfg.noise(e.amplifier);
    if (e.injected_n_n) {
        noise.n_n = *e.injected_n_n;
    }
    SynthesisOptions so;
    so.jumps = e.jumps;
    const std::vector<Level> preps{Level::g, Level::e};
    std::vector<double> sq;
    std::vector<double> snr;
    std::vector<double> expected;
    CsvTable table({"n_bar", "sqrt_n_bar", "snr", "expected_snr"});
    for (double nb : e.n_bar_grid) {
        ReadoutConfig r = cfg.readout;
        r.n_bar = nb;
        const ShotBatch batch =
            synthesize_batch(preps, cfg.cavity, r, noise, rates, cfg.n_shots, cfg.seed, so);
        sq.push_back(std::sqrt(nb));
        snr.push_back(empirical_snr(batch));
        expected.push_back(expected_snr(nb, cfg.cavity, r, noise));
        table.cell(nb).cell(sq.back()).cell(snr.back()).cell(expected.back());
        table.end_row();
    }
    const EfficiencyFit fit = efficiency_fit(sq, snr, cfg.cavity, cfg.readout);
    OrderedJson j = header_json(cfg);
    j["amplifier"] = amplifier_name(e.amplifier);
    j["injected_n_n"] = noise.n_n;
    j["n_n"] = fit.n_n;
    j["eta"] = fit.eta;
    j["t_n_eff_k"] = fit.t_n_eff;
    j["slope"] = fit.slope;
    j["slope_err"] = fit.slope_err;
    j["intercept"] = fit.intercept;
    j["intercept_err"] = fit.intercept_err;
    j["r_squared"] = fit.r_squared;
    OrderedJson ident;
    ident["jpa_off"] = noise_json(cfg.jpa_off, cfg.cavity.omega_r_ghz);
    ident["jpa_on"] = noise_json(cfg.jpa_on, cfg.cavity.omega_r_ghz);
    j["configured_chains"] = ident;
    std::vector<OutputFile> files;
    files.push_back({"efficiency_fit.json", dump_fixed(j)});
    files.push_back({"efficiency_points.csv", table.str()});
    if (options.svg) {
        std::vector<double> line;
        for (double x : sq) {
            line.push_back(fit.intercept + fit.slope * x);
        }
        files.push_back({"efficiency.svg",
                         svg_plot("SNR against sqrt(n_bar)", "sqrt(n_bar)", "SNR",
                                  {{"simulated", sq, snr, true}, {"linear fit", sq, line}})});
    }
    return files;
}

}  // namespace

ShotSettings shot_settings(const ScenarioConfig& cfg) {
    ShotSettings s;
    if (const auto* e = std::get_if<SingleShotExperiment>(&cfg.experiment)) {
        s = {e->amplifier, e->prep_error, e->jumps, e->shared_sigma};
    } else if (const auto* e = std::get_if<PowerSweepExperiment>(&cfg.experiment)) {
        s = {e->amplifier, e->prep_error, e->jumps, true};
    } else if (const auto* e = std::get_if<TimeSweepExperiment>(&cfg.experiment)) {
        s = {e->amplifier, e->prep_error, e->jumps, true};
    } else {
        throw ValidationError("experiment '" + cfg.experiment_name +
                              "' does not synthesize single-shot batches");
    }
    return s;
}

SingleShotPoint single_shot_point(const ScenarioConfig& cfg, const ReadoutConfig& readout,
                                  const ShotSettings& settings) {
    const RateModel rates = cfg.rate_model();
    const std::vector<Level> preps{Level::g, Level::e};
    SingleShotPoint p;
    p.batch = synthesize_batch(preps, cfg.cavity, readout, cfg.noise(settings.amplifier), rates,
                               cfg.n_shots, cfg.seed, synthesis_options(settings));
    MixtureOptions mo;
    mo.shared_sigma = settings.shared_sigma;
    p.report = analyze_batch(p.batch, mo);
    p.report.expected_snr =
        expected_snr(readout.n_bar, cfg.cavity, readout, cfg.noise(settings.amplifier));
    return p;
}

OrderedJson fidelity_report_json(const ScenarioConfig& cfg, const SingleShotPoint& point,
                                 const ShotSettings& settings) {
    const FidelityReport& r = point.report;
    OrderedJson j = header_json(cfg);
    j["amplifier"] = amplifier_name(settings.amplifier);
    j["prep_error"] = settings.prep_error;
    j["n_shots_per_state"] = cfg.n_shots;
    j["readout"] = readout_json(point.batch.config);
    j["noise"] = noise_json(point.batch.noise, cfg.cavity.omega_r_ghz);
    j["threshold"] = r.threshold.value;
    j["e_above"] = r.threshold.e_above;
    j["degenerate"] = r.threshold.degenerate;
    j["fidelity"] = r.assignment.fidelity;
    j["p0_g"] = r.assignment.p0_g;
    j["p1_e"] = r.assignment.p1_e;
    j["p0_g_ci"] = interval_json(r.assignment.p0_g_ci);
    j["p1_e_ci"] = interval_json(r.assignment.p1_e_ci);
    OrderedJson counts;
    counts["g"] = {r.assignment.counts[0][0], r.assignment.counts[0][1]};
    counts["e"] = {r.assignment.counts[1][0], r.assignment.counts[1][1]};
    j["confusion"] = counts;
    j["f_q"] = nullptr;
    j["eps_snr"] = r.eps_snr;
    j["eps_prep_mix"] = r.eps_prep_mix;
    j["snr"] = r.snr;
    j["expected_snr"] = r.expected_snr;
    OrderedJson fits;
    fits["g"] = fit_json(r.fit_g);
    fits["e"] = fit_json(r.fit_e);
    j["fits"] = fits;
    return j;
}

std::vector<OutputFile> run_experiment(const ScenarioConfig& cfg, const RunOptions& options) {
    return std::visit(
        [&](const auto& e) -> std::vector<OutputFile> {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, SingleShotExperiment>) {
                return run_single_shot(cfg, e, options);
            } else if constexpr (std::is_same_v<T, QndExperiment>) {
                return run_qnd(cfg, e, options);
            } else if constexpr (std::is_same_v<T, PowerSweepExperiment>) {
                return run_power_sweep(cfg, e, options);
            } else if constexpr (std::is_same_v<T, TimeSweepExperiment>) {
                return run_time_sweep(cfg, e, options);
            } else if constexpr (std::is_same_v<T, BackactionExperiment>) {
                return run_backaction(cfg, e, options);
            } else if constexpr (std::is_same_v<T, CkpExperiment>) {
                return run_ckp(cfg, e, options);
            } else if constexpr (std::is_same_v<T, ResetExperiment>) {
                return run_reset(cfg, e, options);
            } else {
                return run_efficiency(cfg, e, options);
            }
        },
        cfg.experiment);
}

}  // namespace fluxshot
