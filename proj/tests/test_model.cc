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

#include <gtest/gtest.h>

#include "fluxshot/errors.h"
#include "fluxshot/levels.h"
#include "fluxshot/model.h"
#include "oracles.h"

using namespace fluxshot;

TEST(Levels, NamesRoundTrip) {
    for (std::size_t k = 0; k < kMaxLevels; ++k) {
        const Level l = level_from_index(k);
        EXPECT_EQ(index_of(l), k);
        EXPECT_EQ(parse_level(level_name(l)), l);
    }
    EXPECT_THROW(parse_level("z"), Error);
    EXPECT_THROW(level_from_index(kMaxLevels), Error);
}

TEST(Levels, TrajectoryLookup) {
    LevelTrajectory t;
    t.initial = Level::g;
    t.jump_times = {1.0, 2.0};
    t.levels = {Level::e, Level::h};
    EXPECT_EQ(t.level_at(0.5), Level::g);
    EXPECT_EQ(t.level_at(1.5), Level::e);
    EXPECT_EQ(t.level_at(2.5), Level::h);
    EXPECT_EQ(t.final_level(), Level::h);
    EXPECT_EQ(t.num_jumps(), 2u);
}

TEST(Spectrum, HarmonicLimitIsEquallySpaced) {
    const FluxoniumParams p{0.0, 0.754, 0.998, 0.0};
    const EnergySpectrum s = diagonalize(p, 40);
    const double w = std::sqrt(8.0 * 0.754 * 0.998);
    for (int n = 1; n < 6; ++n) {
        EXPECT_NEAR(s.levels[static_cast<std::size_t>(n)], n * w, 1e-9);
    }
}

TEST(Spectrum, TableParametersAtHalfFlux) {
    const FluxoniumParams p{4.098, 0.754, 0.998, oracle::kPi};
    const EnergySpectrum s = diagonalize(p);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.transition(Level::g, Level::e), 0.32812, 0.02 * 0.32812);
    EXPECT_NEAR(s.transition(Level::e, Level::f), 3.062, 0.02 * 3.062);
}

TEST(Spectrum, SymmetricUnderFluxReflection) {
    const FluxoniumParams a{4.098, 0.754, 0.998, 0.3 * oracle::kPi};
    const FluxoniumParams b{4.098, 0.754, 0.998, -0.3 * oracle::kPi};
    const auto ea = fluxonium_eigenvalues(a, 80);
    const auto eb = fluxonium_eigenvalues(b, 80);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(ea[k], eb[k], 1e-8);
    }
}

TEST(Spectrum, RejectsBadParameters) {
    EXPECT_THROW(diagonalize({4.0, -0.1, 1.0, 0.0}), ParameterError);
    EXPECT_THROW(diagonalize({4.0, 0.7, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(diagonalize({-1.0, 0.7, 1.0, 0.0}), ParameterError);
}

TEST(Reflection, MatchesClosedForm) {
    const CavityParams c = oracle::table_cavity();
    for (double f : {7.150, 7.1664, 7.167, 7.1676, 7.19}) {
        for (Level l : {Level::g, Level::e, Level::h}) {
            const double delta = (f - c.omega_r_ghz) * 1e3 - c.chi_mhz.at(l);
            const std::complex<double> expected =
                1.0 - c.kappa_s_mhz / std::complex<double>(0.5 * c.kappa_total_mhz(), -delta);
            const auto got = reflection(c, f, l);
            EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-14);
        }
    }
}

TEST(Reflection, LosslessCavityHasUnitModulus) {
    CavityParams c = oracle::table_cavity();
    c.kappa_w_mhz = 0.0;
    for (double f : {7.15, 7.167, 7.18}) {
        EXPECT_NEAR(std::abs(reflection(c, f, Level::g)), 1.0, 1e-12);
    }
}

TEST(Reflection, PointerAngleOfSymmetricPulls) {
    const CavityParams c = oracle::table_cavity();
    const double deg = pointer_separation_angle(c, 7.167) * 180.0 / oracle::kPi;
    EXPECT_NEAR(deg, 26.743, 0.01);
}

TEST(Cavity, MissingChiIsLookupError) {
    CavityParams c = oracle::table_cavity();
    EXPECT_THROW(c.chi(Level::i), LookupError);
    EXPECT_THROW(reflection(c, 7.167, Level::i), LookupError);
}

TEST(Cavity, RingUpMatchesClosedForm) {
    const CavityParams c = oracle::table_cavity();
    const double drive = 3.0e3;
    for (double t : {0.0, 5e-9, 20e-9, 100e-9, 1e-6}) {
        const auto got = cavity_field(c, Level::e, drive, 7.167, 0.0, t);
        const auto want = oracle::ring_up(c.kappa_total_mhz(), c.kappa_s_mhz,
                                          (7.167 - c.omega_r_ghz) * 1e3 - 0.6, drive, t);
        EXPECT_NEAR(std::abs(got - want), 0.0, 1e-9 * std::abs(want) + 1e-12);
    }
    const auto traj = ring_up(c, Level::g, drive, 7.167, 200e-9, 1e-10);
    ASSERT_FALSE(traj.alpha.empty());
    EXPECT_NEAR(std::abs(traj.alpha.back() - steady_amplitude(c, Level::g, drive, 7.167)), 0.0,
                1e-3 * std::abs(traj.alpha.back()));
}

TEST(Cavity, DriveForPhotonNumberInverts) {
    const CavityParams c = oracle::table_cavity();
    for (double n : {1.0, 27.0, 112.0, 4000.0}) {
        const double a = drive_for_photon_number(c, n, 7.167);
        EXPECT_NEAR(nominal_photon_number(c, a, 7.167), n, 1e-9 * n);
    }
    EXPECT_THROW(drive_for_photon_number(c, -1.0, 7.167), ParameterError);
}

TEST(Cavity, SteadyPhotonNumberIsLorentzian) {
    const CavityParams c = oracle::table_cavity();
    const double a = 1000.0;
    const double w = 2.0 * oracle::kPi * 1e6;
    for (double f : {7.160, 7.1664, 7.175}) {
        const double delta = ((f - c.omega_r_ghz) * 1e3 + 0.6) * w;
        const double k = c.kappa_total_mhz() * w;
        const double want = c.kappa_s_mhz * w * a * a / (0.25 * k * k + delta * delta);
        EXPECT_NEAR(steady_photon_number(c, Level::g, a, f), want, 1e-9 * want);
    }
}

TEST(Cavity, IntegratedRecordMatchesQuadrature) {
    const CavityParams c = oracle::table_cavity();
    const double a = 2000.0;
    const std::vector<DriveSegment> drive{{300e-9, a}, {100e-9, 0.0}};
    LevelTrajectory path;
    path.initial = Level::g;
    path.jump_times = {150e-9};
    path.levels = {Level::e};
    const std::vector<Window> windows{{50e-9, 350e-9}};
    const auto got = integrate_reflected(c, 7.167, drive, path, windows);
    // Midpoint rule over reflected output sampled on a fine grid.
    const int n = 30000;
    std::vector<double> times;
    for (int k = 0; k < n; ++k) {
        times.push_back(50e-9 + (k + 0.5) * 300e-9 / n);
    }
    const auto samples = sample_reflected(c, 7.167, drive, path, times);
    std::complex<double> sum = 0.0;
    for (const auto& s : samples) {
        sum += s;
    }
    sum *= 300e-9 / n;
    ASSERT_EQ(got.size(), 1u);
    EXPECT_NEAR(std::abs(got[0] - sum), 0.0, 1e-5 * std::abs(sum));
}

TEST(Cavity, FFactorOfTableCavity) {
    const CavityParams c = oracle::table_cavity();
    const double db = analytic_f_factor_db(c, 7.167);
    EXPECT_LT(db, 0.0);
    EXPECT_GT(db, -20.0);
}
