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

#ifndef FLUXSHOT_DYNAMICS_H
#define FLUXSHOT_DYNAMICS_H

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fluxshot/levels.h"
#include "fluxshot/model.h"
#include "fluxshot/readout.h"
#include "fluxshot/rng.h"

namespace fluxshot {

/// Photon-activated transition rate c * n^p for one ordered level pair.
struct MistTerm {
    Level from = Level::g;
    Level to = Level::e;
    double c = 0.0;  // 1/s at n = 1
    double p = 1.0;
};

/// Transition rates between qubit levels. Rates are photon-independent base
/// rates plus measurement-induced terms; the generator has rows indexed by the
/// source level and a diagonal equal to minus the off-diagonal row sum.
class RateModel {
   public:
    explicit RateModel(std::size_t num_levels = 2, double temperature = 0.0);

    /// Two-level thermal qubit: Gamma_down + Gamma_up = 1 / t1 with the ratio
    /// Gamma_up / Gamma_down = exp(-h f / k T).
    static RateModel thermal_qubit(double qubit_freq_ghz, double t1, double temperature,
                                   std::size_t num_levels = 2);

    void set_base_rate(Level from, Level to, double rate);
    void add_mist(const MistTerm& term);

    std::size_t num_levels() const { return num_levels_; }
    double temperature() const { return temperature_; }
    double base_rate(Level from, Level to) const;
    const std::vector<MistTerm>& mist_terms() const { return mist_; }

    double rate(Level from, Level to, double n_bar) const;
    double exit_rate(Level from, double n_bar) const;
    Eigen::MatrixXd generator(double n_bar) const;
    bool has_mist() const { return !mist_.empty(); }
    /// Copy with every measurement-induced term removed.
    RateModel without_mist() const;

   private:
    void check(Level level) const;

    std::size_t num_levels_;
    double temperature_;
    Eigen::MatrixXd base_;
    std::vector<MistTerm> mist_;
};

/// Time-dependent intracavity photon number as bounded segments. Outside every
/// segment the cavity is empty.
class PhotonSchedule {
   public:
    struct Segment {
        double start = 0.0;
        double end = 0.0;
        double bound = 0.0;  // >= n_bar(t) on [start, end)
        std::function<double(double)> n_bar;
    };

    PhotonSchedule() = default;
    static PhotonSchedule constant(double n_bar, double duration);
    /// Nominal (mean g/e pull) ring-up and ring-down photon number of a drive sequence.
    static PhotonSchedule from_drive(const CavityParams& cavity, double drive_freq_ghz,
                                     std::span<const DriveSegment> drive);

    void add(Segment segment);
    double operator()(double t) const;
    const std::vector<Segment>& segments() const { return segments_; }

   private:
    std::vector<Segment> segments_;
};

/// Markov jump trajectory with rates r_ij(t) = base_ij + c_ij n(t)^p_ij, sampled
/// exactly by thinning against the per-segment photon bound.
LevelTrajectory evolve(Level initial, const RateModel& rates, const PhotonSchedule& photons,
                       double duration, Rng& rng);
LevelTrajectory evolve(Level initial, const RateModel& rates, const PhotonSchedule& photons,
                       double duration, std::uint64_t seed);

/// Population vector after `duration` from time `start`, integrating dp/dt = p Q(n(t))
/// with RK4.
Eigen::VectorXd solve_master_equation(const RateModel& rates, const PhotonSchedule& photons,
                                      const Eigen::VectorXd& initial, double duration,
                                      double start = 0.0);

/// Two-level Boltzmann excited-state population at `temperature` (K).
double thermal_population(double qubit_freq_ghz, double temperature);
/// Temperature (K) at which the two-level excited population equals p_e.
double effective_temperature(double p_e, double qubit_freq_ghz);

/// Two-photon cooling drive frequency (omega_r - omega_q) / 2, GHz.
double sideband_frequency(double omega_r_ghz, double omega_q_ghz);

/// Sideband cooling |e,0> <-> |g,1> -> |g,0> as a three-state rate model.
struct ResetConfig {
    double sideband_rate = 0.0;         // 1/s, both directions of |e,0> <-> |g,1>
    double duration = 0.0;             // s
    double cavity_kappa = 0.0;          // 1/s, |g,1> -> |g,0>
    double rethermalization_rate = 0.0; // 1/s, |g,0> -> |e,0>
    double qubit_decay_rate = 0.0;      // 1/s, |e,0> -> |g,0>

    void validate() const;
};

/// Populations (e0, g1, g0) after the reset drive.
Eigen::Vector3d reset_populations(double p_e_initial, const ResetConfig& cfg);
/// Residual excited-state population after the reset drive.
double reset_simulate(double p_e_initial, const ResetConfig& cfg);

struct BackactionOptions {
    double gap = 200e-9;  // ring-down between the leak tone and the final readout, s
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Leak tone at a_r times the readout amplitude for each tau_leak, then a full
/// readout. Returns the ensemble-averaged I signal normalized so pinned g reads 0
/// and pinned e reads 1.
std::vector<double> backaction_experiment(Level prepared, double a_r,
                                          std::span<const double> tau_leak_grid,
                                          const RateModel& rates, const CavityParams& cavity,
                                          const ReadoutConfig& readout, std::size_t n_traj,
                                          const BackactionOptions& options = {});

}  // namespace fluxshot

#endif
