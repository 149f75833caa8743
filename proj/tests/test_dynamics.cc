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

#include <random>

#include <gtest/gtest.h>

#include "fluxshot/dynamics.h"
#include "fluxshot/errors.h"
#include "fluxshot/parallel.h"
#include "fluxshot/rng.h"
#include "oracles.h"

using namespace fluxshot;

namespace {

RateModel random_model(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RateModel m(4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (i != j && u(gen) < 0.7) {
                m.set_base_rate(level_from_index(i), level_from_index(j), 2e5 * u(gen));
            }
        }
    }
    return m;
}

Eigen::VectorXd occupancy(const RateModel& m, Level start, double t, std::size_t n,
                          std::uint64_t seed) {
    const PhotonSchedule photons = PhotonSchedule::constant(0.0, t);
    std::vector<int> final_level(n);
    parallel_for(n, [&](std::size_t k) {
        Rng rng = make_stream(seed, k);
        final_level[k] = static_cast<int>(index_of(evolve(start, m, photons, t, rng).final_level()));
    });
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_levels()));
    for (int l : final_level) {
        p[l] += 1.0 / static_cast<double>(n);
    }
    return p;
}

}  // namespace

TEST(Rates, ThermalDetailedBalance) {
    const RateModel m = RateModel::thermal_qubit(0.32812, 402e-6, 0.025, 2);
    const double up = m.base_rate(Level::g, Level::e);
    const double down = m.base_rate(Level::e, Level::g);
    EXPECT_NEAR(up + down, 1.0 / 402e-6, 1e-9);
    const double p = oracle::boltzmann_excited(0.32812, 0.025);
    EXPECT_NEAR(up / down, p / (1.0 - p), 1e-12);
}

TEST(Rates, GeneratorRowsSumToZero) {
    RateModel m = random_model(3);
    m.add_mist({Level::g, Level::h, 0.3, 2.0});
    for (double n : {0.0, 10.0, 200.0}) {
        const Eigen::MatrixXd q = m.generator(n);
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            EXPECT_NEAR(q.row(r).sum(), 0.0, 1e-9);
        }
    }
    EXPECT_NEAR(m.rate(Level::g, Level::h, 10.0) - m.base_rate(Level::g, Level::h), 30.0, 1e-9);
    EXPECT_FALSE(m.without_mist().has_mist());
}

TEST(Rates, RejectsLevelsOutsideModel) {
    RateModel m(2);
    EXPECT_THROW(m.set_base_rate(Level::g, Level::h, 1.0), Error);
    EXPECT_THROW(m.set_base_rate(Level::g, Level::e, -1.0), ParameterError);
}

TEST(MasterEquation, MatchesMatrixExponential) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const RateModel m = random_model(100 + s);
        Eigen::VectorXd p0 = Eigen::VectorXd::Zero(4);
        p0[static_cast<Eigen::Index>(s % 4)] = 1.0;
        const double t = 7e-6;
        const auto got =
            solve_master_equation(m, PhotonSchedule::constant(0.0, t), p0, t);
        const auto want = oracle::propagate(m.generator(0.0), p0, t);
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-7);
        EXPECT_NEAR(got.sum(), 1.0, 1e-12);
    }
}

TEST(MasterEquation, ConstantPhotonsWithMeasurementInducedRates) {
    RateModel m = random_model(7);
    m.add_mist({Level::g, Level::e, 500.0, 1.0});
    m.add_mist({Level::e, Level::h, 20.0, 2.0});
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(4);
    p0[0] = 0.6;
    p0[1] = 0.4;
    const double n = 120.0;
    const double t = 3e-6;
    const auto got = solve_master_equation(m, PhotonSchedule::constant(n, t), p0, t);
    const auto want = oracle::propagate(m.generator(n), p0, t);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MasterEquation, OffsetStartUsesLaterSchedule) {
    RateModel m(2);
    m.add_mist({Level::g, Level::e, 1e4, 1.0});
    PhotonSchedule s;
    s.add({0.0, 1e-6, 0.0, [](double) { return 0.0; }});
    s.add({1e-6, 2e-6, 50.0, [](double) { return 50.0; }});
    Eigen::VectorXd p0(2);
    p0 << 1.0, 0.0;
    const auto quiet = solve_master_equation(m, s, p0, 1e-6, 0.0);
    const auto driven = solve_master_equation(m, s, p0, 1e-6, 1e-6);
    EXPECT_NEAR(quiet[1], 0.0, 1e-12);
    EXPECT_NEAR(driven[1], 1.0 - std::exp(-5e5 * 1e-6), 1e-6);
}

TEST(JumpProcess, OccupanciesMatchMasterEquation) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const RateModel m = random_model(200 + s);
        const double t = 4e-6;
        const auto mc = occupancy(m, Level::g, t, 40000, 900 + s);
        Eigen::VectorXd p0 = Eigen::VectorXd::Zero(4);
        p0[0] = 1.0;
        const auto me = oracle::propagate(m.generator(0.0), p0, t);
        EXPECT_LT(0.5 * (mc - me).cwiseAbs().sum(), 0.015);
    }
}

TEST(JumpProcess, ThinningHandlesTimeDependentPhotons) {
    RateModel m(2);
    m.add_mist({Level::g, Level::e, 2e3, 1.0});
    const CavityParams c = oracle::table_cavity();
    const std::vector<DriveSegment> drive{{400e-9, drive_for_photon_number(c, 300.0, 7.167)}};
    const PhotonSchedule photons = PhotonSchedule::from_drive(c, 7.167, drive);
    const std::size_t n = 40000;
    std::vector<int> flipped(n);
    parallel_for(n, [&](std::size_t k) {
        Rng rng = make_stream(5, k);
        flipped[k] = evolve(Level::g, m, photons, 400e-9, rng).final_level() == Level::e;
    });
    double frac = 0.0;
    for (int f : flipped) {
        frac += f;
    }
    frac /= static_cast<double>(n);
    Eigen::VectorXd p0(2);
    p0 << 1.0, 0.0;
    const double want = solve_master_equation(m, photons, p0, 400e-9)[1];
    EXPECT_NEAR(frac, want, 4.0 * std::sqrt(want * (1.0 - want) / n) + 1e-3);
}

TEST(JumpProcess, JumpTimesIncreaseAndStayInRange) {
    const RateModel m = random_model(42);
    Rng rng = make_stream(1, 2);
    const auto traj = evolve(Level::e, m, PhotonSchedule::constant(0.0, 50e-6), 50e-6, rng);
    ASSERT_GT(traj.num_jumps(), 0u);
    for (std::size_t k = 0; k < traj.num_jumps(); ++k) {
        EXPECT_GT(traj.jump_times[k], k ? traj.jump_times[k - 1] : 0.0);
        EXPECT_LT(traj.jump_times[k], 50e-6);
        EXPECT_NE(traj.levels[k], k ? traj.levels[k - 1] : traj.initial);
    }
}

TEST(Thermal, PopulationAndTemperatureRoundTrip) {
    EXPECT_NEAR(thermal_population(0.32812, 0.025), oracle::boltzmann_excited(0.32812, 0.025),
                1e-14);
    for (double t : {0.005, 0.02, 0.1}) {
        EXPECT_NEAR(effective_temperature(thermal_population(0.32812, t), 0.32812), t, 1e-12);
    }
    EXPECT_THROW(effective_temperature(0.5, 0.32812), NoFiniteTemperatureError);
    EXPECT_THROW(effective_temperature(0.0, 0.32812), ParameterError);
    EXPECT_THROW(thermal_population(0.32812, 0.0), ParameterError);
}

TEST(Reset, SidebandFrequencyAndValidation) {
    EXPECT_NEAR(sideband_frequency(7.167, 0.328), 0.5 * (7.167 - 0.328), 1e-15);
    EXPECT_THROW(sideband_frequency(0.3, 0.5), ParameterError);
    ResetConfig bad;
    bad.sideband_rate = -1.0;
    EXPECT_THROW(reset_simulate(0.3, bad), ParameterError);
}

TEST(Reset, ThreeStateModelMatchesMatrixExponential) {
    ResetConfig c;
    c.sideband_rate = 2.6e4;
    c.duration = 200e-6;
    c.cavity_kappa = 9.8e7;
    c.rethermalization_rate = 870.0;
    c.qubit_decay_rate = 1620.0;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
    q(0, 1) = q(1, 0) = c.sideband_rate;
    q(1, 2) = c.cavity_kappa;
    q(2, 0) = c.rethermalization_rate;
    q(0, 2) = c.qubit_decay_rate;
    for (int k = 0; k < 3; ++k) {
        q(k, k) = -q.row(k).sum();
    }
    Eigen::VectorXd p0(3);
    p0 << 0.35, 0.0, 0.65;
    const auto want = oracle::propagate(q, p0, c.duration);
    const auto got = reset_populations(0.35, c);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reset, ZeroSidebandKeepsThermalEquilibrium) {
    ResetConfig c;
    c.duration = 100e-6;
    c.cavity_kappa = 1e7;
    c.qubit_decay_rate = 1000.0;
    c.rethermalization_rate = 1000.0 * 0.35 / 0.65;
    EXPECT_NEAR(reset_simulate(0.35, c), 0.35, 1e-12);
}

TEST(Backaction, NoLeakedPhotonsGivesPlainRelaxation) {
    const RateModel m = RateModel::thermal_qubit(0.32812, 402e-6, 0.025, 2);
    ReadoutConfig r;
    r.n_bar = 126.0;
    r.tau_int = 260e-9;
    r.pulse_len = 340e-9;
    const std::vector<double> taus{0.0, 200e-6, 600e-6};
    const auto signal = backaction_experiment(Level::e, 0.0, taus, m, oracle::table_cavity(), r,
                                              4000);
    const double peq = thermal_population(0.32812, 0.025);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double want = peq + (1.0 - peq) * std::exp(-taus[k] / 402e-6);
        EXPECT_NEAR(signal[k], want, 0.03);
    }
    EXPECT_THROW(backaction_experiment(Level::e, 2.0, taus, m, oracle::table_cavity(), r, 4000),
                 ParameterError);
}

TEST(Rng, StreamsAreIndependentOfOrder) {
    Rng a = make_stream(9, 3, 1);
    Rng b = make_stream(9, 3, 1);
    Rng c = make_stream(9, 4, 1);
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(make_stream(9, 3, 2)(), make_stream(9, 3, 1)());
}

TEST(Parallel, ResultsIndependentOfWorkers) {
    std::vector<std::uint64_t> one(1000);
    std::vector<std::uint64_t> many(1000);
    parallel_for(1000, [&](std::size_t k) { one[k] = make_stream(11, k)(); }, 1);
    parallel_for(1000, [&](std::size_t k) { many[k] = make_stream(11, k)(); }, 8);
    EXPECT_EQ(one, many);
    EXPECT_GE(worker_count(3), 1u);
}
