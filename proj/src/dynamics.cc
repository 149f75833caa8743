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

#include "fluxshot/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fluxshot/constants.h"
#include "fluxshot/errors.h"
#include "fluxshot/parallel.h"

namespace fluxshot {

namespace {

// RK4 on dp/dt = p Q with h * max exit rate <= 0.05.
Eigen::VectorXd integrate_constant(const Eigen::MatrixXd& q, Eigen::VectorXd p, double duration) {
    if (duration <= 0.0) {
        return p;
    }
    const double max_rate = (-q.diagonal()).maxCoeff();
    if (!(max_rate > 0.0)) {
        return p;
    }
    const auto steps = static_cast<long>(std::ceil(duration * max_rate / 0.05));
    const double h = duration / static_cast<double>(steps);
    const Eigen::MatrixXd qt = q.transpose();
    for (long k = 0; k < steps; ++k) {
        const Eigen::VectorXd k1 = qt * p;
        const Eigen::VectorXd k2 = qt * (p + 0.5 * h * k1);
        const Eigen::VectorXd k3 = qt * (p + 0.5 * h * k2);
        const Eigen::VectorXd k4 = qt * (p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

struct Piece {
    double start;
    double end;
    double bound;
    const std::function<double(double)>* n_bar;  // null means an empty cavity
};

std::vector<Piece> pieces_until(const PhotonSchedule& photons, double duration,
                                double start = 0.0) {
    std::vector<Piece> out;
    double cursor = start;
    for (const auto& seg : photons.segments()) {
        if (cursor >= duration) {
            break;
        }
        if (seg.end <= cursor) {
            continue;
        }
        if (seg.start > cursor) {
            const double stop = std::min(seg.start, duration);
            out.push_back({cursor, stop, 0.0, nullptr});
            cursor = stop;
            if (cursor >= duration) {
                break;
            }
        }
        const double stop = std::min(seg.end, duration);
        out.push_back({cursor, stop, seg.bound, &seg.n_bar});
        cursor = stop;
    }
    if (cursor < duration) {
        out.push_back({cursor, duration, 0.0, nullptr});
    }
    return out;
}

}  // namespace

RateModel::RateModel(std::size_t num_levels, double temperature)
    : num_levels_(num_levels),
      temperature_(temperature),
      base_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_levels),
                                  static_cast<Eigen::Index>(num_levels))) {
    if (num_levels < 2 || num_levels > kMaxLevels) {
        throw ParameterError("rate model needs between 2 and 5 levels");
    }
    if (temperature < 0.0) {
        throw ParameterError("temperature must be non-negative");
    }
}

RateModel RateModel::thermal_qubit(double qubit_freq_ghz, double t1, double temperature,
                                   std::size_t num_levels) {
    if (!(t1 > 0.0)) {
        throw ParameterError("T1 must be positive");
    }
    if (!(qubit_freq_ghz > 0.0)) {
        throw ParameterError("qubit frequency must be positive");
    }
    RateModel model(num_levels, temperature);
    const double boltzmann =
        temperature > 0.0 ? std::exp(-kPlanck * qubit_freq_ghz * 1e9 / (kBoltzmann * temperature))
                          : 0.0;
    const double down = 1.0 / (t1 * (1.0 + boltzmann));
    model.set_base_rate(Level::e, Level::g, down);
    model.set_base_rate(Level::g, Level::e, boltzmann * down);
    return model;
}

void RateModel::check(Level level) const {
    if (index_of(level) >= num_levels_) {
        throw LookupError("level " + std::string(level_name(level)) +
                          " is outside the rate model");
    }
}

void RateModel::set_base_rate(Level from, Level to, double rate) {
    check(from);
    check(to);
    if (from == to) {
        throw ParameterError("base rates connect distinct levels");
    }
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ParameterError("transition rates must be non-negative");
    }
    base_(static_cast<Eigen::Index>(index_of(from)), static_cast<Eigen::Index>(index_of(to))) =
        rate;
}

void RateModel::add_mist(const MistTerm& term) {
    check(term.from);
    check(term.to);
    if (term.from == term.to) {
        throw ParameterError("measurement-induced terms connect distinct levels");
    }
    if (!(term.c >= 0.0) || !(term.p > 0.0) || !std::isfinite(term.c) || !std::isfinite(term.p)) {
        throw ParameterError("measurement-induced terms need c >= 0 and p > 0");
    }
    mist_.push_back(term);
}

double RateModel::base_rate(Level from, Level to) const {
    check(from);
    check(to);
    return base_(static_cast<Eigen::Index>(index_of(from)), static_cast<Eigen::Index>(index_of(to)));
}

double RateModel::rate(Level from, Level to, double n_bar) const {
    if (from == to) {
        return 0.0;
    }
    double r = base_rate(from, to);
    if (n_bar > 0.0) {
        for (const auto& term : mist_) {
            if (term.from == from && term.to == to) {
                r += term.c * std::pow(n_bar, term.p);
            }
        }
    }
    return r;
}

double RateModel::exit_rate(Level from, double n_bar) const {
    check(from);
    double total = base_.row(static_cast<Eigen::Index>(index_of(from))).sum();
    if (n_bar > 0.0) {
        for (const auto& term : mist_) {
            if (term.from == from) {
                total += term.c * std::pow(n_bar, term.p);
            }
        }
    }
    return total;
}

Eigen::MatrixXd RateModel::generator(double n_bar) const {
    Eigen::MatrixXd q = base_;
    if (n_bar > 0.0) {
        for (const auto& term : mist_) {
            q(static_cast<Eigen::Index>(index_of(term.from)),
              static_cast<Eigen::Index>(index_of(term.to))) += term.c * std::pow(n_bar, term.p);
        }
    }
    for (Eigen::Index k = 0; k < q.rows(); ++k) {
        q(k, k) = 0.0;
        q(k, k) = -q.row(k).sum();
    }
    return q;
}

RateModel RateModel::without_mist() const {
    RateModel copy = *this;
    copy.mist_.clear();
    return copy;
}

PhotonSchedule PhotonSchedule::constant(double n_bar, double duration) {
    if (!(n_bar >= 0.0)) {
        throw ParameterError("photon number must be non-negative");
    }
    PhotonSchedule schedule;
    schedule.add({0.0, duration, n_bar, [n_bar](double) { return n_bar; }});
    return schedule;
}

PhotonSchedule PhotonSchedule::from_drive(const CavityParams& cavity, double drive_freq_ghz,
                                          std::span<const DriveSegment> drive) {
    PhotonSchedule schedule;
    for (const auto& seg : nominal_field_segments(cavity, drive_freq_ghz, drive)) {
        schedule.add({seg.start, seg.end, seg.photon_bound(),
                      [seg](double t) { return std::norm(seg.at(t)); }});
    }
    return schedule;
}

void PhotonSchedule::add(Segment segment) {
    if (!(segment.end >= segment.start)) {
        throw ParameterError("photon schedule segment must have end >= start");
    }
    if (!segments_.empty() && segment.start < segments_.back().end) {
        throw ParameterError("photon schedule segments must be ordered and disjoint");
    }
    if (!(segment.bound >= 0.0)) {
        throw ParameterError("photon bound must be non-negative");
    }
    segments_.push_back(std::move(segment));
}

double PhotonSchedule::operator()(double t) const {
    for (const auto& seg : segments_) {
        if (t >= seg.start && t < seg.end) {
            return seg.n_bar(t);
        }
    }
    return 0.0;
}

LevelTrajectory evolve(Level initial, const RateModel& rates, const PhotonSchedule& photons,
                       double duration, Rng& rng) {
    if (!(duration > 0.0)) {
        throw ParameterError("evolution duration must be positive");
    }
    if (index_of(initial) >= rates.num_levels()) {
        throw LookupError("initial level is outside the rate model");
    }
    LevelTrajectory traj;
    traj.initial = initial;
    Level level = initial;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::size_t n_levels = rates.num_levels();

    for (const Piece& piece : pieces_until(photons, duration)) {
        double t = piece.start;
        for (;;) {
            const double bound = rates.exit_rate(level, piece.bound);
            if (!(bound > 0.0)) {
                break;
            }
            t += std::exponential_distribution<double>(bound)(rng);
            if (t >= piece.end) {
                break;
            }
            const double n = piece.n_bar != nullptr ? std::max(0.0, (*piece.n_bar)(t)) : 0.0;
            const double actual = rates.exit_rate(level, n);
            const double u = uniform(rng) * bound;
            if (u >= actual) {
                continue;
            }
            // Reuse u (uniform on [0, actual)) to pick the destination.
            double acc = 0.0;
            Level next = level;
            for (std::size_t j = 0; j < n_levels; ++j) {
                const Level cand = level_from_index(j);
                if (cand == level) {
                    continue;
                }
                const double r = rates.rate(level, cand, n);
                if (r <= 0.0) {
                    continue;
                }
                acc += r;
                next = cand;
                if (u < acc) {
                    break;
                }
            }
            if (next == level) {
                continue;
            }
            level = next;
            traj.jump_times.push_back(t);
            traj.levels.push_back(level);
        }
    }
    return traj;
}

LevelTrajectory evolve(Level initial, const RateModel& rates, const PhotonSchedule& photons,
                       double duration, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0);
    return evolve(initial, rates, photons, duration, rng);
}

Eigen::VectorXd solve_master_equation(const RateModel& rates, const PhotonSchedule& photons,
                                      const Eigen::VectorXd& initial, double duration,
                                      double start) {
    if (initial.size() != static_cast<Eigen::Index>(rates.num_levels())) {
        throw ParameterError("population vector size does not match the rate model");
    }
    if (duration < 0.0) {
        throw ParameterError("duration must be non-negative");
    }
    Eigen::VectorXd p = initial;
    if (duration == 0.0) {
        return p;
    }
    for (const Piece& piece : pieces_until(photons, start + duration, start)) {
        if (piece.n_bar == nullptr || !rates.has_mist()) {
            p = integrate_constant(rates.generator(0.0), p,
                                   piece.end - piece.start);
            continue;
        }
        const double max_rate = (-rates.generator(piece.bound).diagonal()).maxCoeff();
        const double span = piece.end - piece.start;
        const auto steps =
            std::max<long>(1, static_cast<long>(std::ceil(span * max_rate / 0.05)));
        const double h = span / static_cast<double>(steps);
        auto deriv = [&](double t, const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return rates.generator(std::max(0.0, (*piece.n_bar)(t))).transpose() * v;
        };
        for (long k = 0; k < steps; ++k) {
            const double t = piece.start + h * static_cast<double>(k);
            const Eigen::VectorXd k1 = deriv(t, p);
            const Eigen::VectorXd k2 = deriv(t + 0.5 * h, p + 0.5 * h * k1);
            const Eigen::VectorXd k3 = deriv(t + 0.5 * h, p + 0.5 * h * k2);
            const Eigen::VectorXd k4 = deriv(t + h, p + h * k3);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return p;
}

double thermal_population(double qubit_freq_ghz, double temperature) {
    if (!(temperature > 0.0)) {
        throw ParameterError("temperature must be positive");
    }
    if (!(qubit_freq_ghz > 0.0)) {
        throw ParameterError("qubit frequency must be positive");
    }
    const double x = kPlanck * qubit_freq_ghz * 1e9 / (kBoltzmann * temperature);
    return 1.0 / (1.0 + std::exp(x));
}

double effective_temperature(double p_e, double qubit_freq_ghz) {
    if (!(p_e > 0.0)) {
        throw ParameterError("excited population must be positive");
    }
    if (p_e >= 0.5) {
        throw NoFiniteTemperatureError("excited population >= 0.5 has no finite temperature");
    }
    if (!(qubit_freq_ghz > 0.0)) {
        throw ParameterError("qubit frequency must be positive");
    }
    return kPlanck * qubit_freq_ghz * 1e9 / (kBoltzmann * std::log1p((1.0 - 2.0 * p_e) / p_e));
}

double sideband_frequency(double omega_r_ghz, double omega_q_ghz) {
    if (!(omega_r_ghz > omega_q_ghz)) {
        throw ParameterError("cooling sideband needs omega_r > omega_q");
    }
    return 0.5 * (omega_r_ghz - omega_q_ghz);
}

void ResetConfig::validate() const {
    if (!(sideband_rate >= 0.0) || !(duration >= 0.0) || !(cavity_kappa >= 0.0) ||
        !(rethermalization_rate >= 0.0) || !(qubit_decay_rate >= 0.0)) {
        throw ParameterError("reset rates and duration must be non-negative");
    }
}

Eigen::Vector3d reset_populations(double p_e_initial, const ResetConfig& cfg) {
    cfg.validate();
    if (!(p_e_initial >= 0.0 && p_e_initial <= 1.0)) {
        throw ParameterError("initial excited population must lie in [0, 1]");
    }
    // States: 0 = |e,0>, 1 = |g,1>, 2 = |g,0>.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
    q(0, 1) = cfg.sideband_rate;
    q(1, 0) = cfg.sideband_rate;
    q(1, 2) = cfg.cavity_kappa;
    q(2, 0) = cfg.rethermalization_rate;
    q(0, 2) = cfg.qubit_decay_rate;
    for (Eigen::Index k = 0; k < 3; ++k) {
        q(k, k) = -q.row(k).sum();
    }
    Eigen::VectorXd p(3);
    p << p_e_initial, 0.0, 1.0 - p_e_initial;
    return integrate_constant(q, p, cfg.duration);
}

double reset_simulate(double p_e_initial, const ResetConfig& cfg) {
    return reset_populations(p_e_initial, cfg)(0);
}

std::vector<double> backaction_experiment(Level prepared, double a_r,
                                          std::span<const double> tau_leak_grid,
                                          const RateModel& rates, const CavityParams& cavity,
                                          const ReadoutConfig& readout, std::size_t n_traj,
                                          const BackactionOptions& options) {
    if (!(a_r >= 0.0 && a_r <= 1.5)) {
        throw ParameterError("a_r must lie in [0, 1.5]");
    }
    if (n_traj < 1000) {
        throw ParameterError("backaction experiment needs at least 1000 trajectories");
    }
    if (options.gap < 0.0) {
        throw ParameterError("gap must be non-negative");
    }
    const ReadoutGeometry geometry = make_geometry(cavity, readout, 1.0);
    std::vector<double> signal;
    signal.reserve(tau_leak_grid.size());
    for (double tau_leak : tau_leak_grid) {
        if (tau_leak < 0.0) {
            throw ParameterError("tau_leak must be non-negative");
        }
        const std::vector<DriveSegment> drive{{tau_leak, a_r * geometry.drive_amp},
                                              {options.gap, 0.0},
                                              {readout.pulse_len, geometry.drive_amp}};
        const double end = tau_leak + options.gap + readout.pulse_len;
        const std::vector<Window> windows{readout_window(readout, end)};
        const PhotonSchedule photons =
            PhotonSchedule::from_drive(cavity, readout.drive_freq_ghz, drive);

        const double ref_g = noiseless_records(cavity, readout, geometry, drive,
                                               {Level::g, {}, {}}, windows)[0]
                                 .real();
        const double ref_e = noiseless_records(cavity, readout, geometry, drive,
                                               {Level::e, {}, {}}, windows)[0]
                                 .real();
        std::vector<double> values(n_traj);
        parallel_for(
            n_traj,
            [&](std::size_t j) {
                Rng rng = make_stream(options.seed, j, 0xBAC);
                const LevelTrajectory path = evolve(prepared, rates, photons, end, rng);
                values[j] =
                    noiseless_records(cavity, readout, geometry, drive, path, windows)[0].real();
            },
            options.threads);
        double mean = 0.0;
        for (double v : values) {
            mean += v;
        }
        mean /= static_cast<double>(n_traj);
        signal.push_back((mean - ref_g) / (ref_e - ref_g));
    }
    return signal;
}

}  // namespace fluxshot
