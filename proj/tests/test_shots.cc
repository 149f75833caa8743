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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "fluxshot/analysis.h"
#include "fluxshot/errors.h"
#include "fluxshot/shots.h"
#include "oracles.h"

using namespace fluxshot;

namespace {

ReadoutConfig jpa_off_readout() {
    ReadoutConfig r;
    r.n_bar = 112.0;
    r.tau_int = 2.82e-6;
    r.pulse_len = 3.02e-6;
    return r;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const std::vector<Level> kGE{Level::g, Level::e};

}  // namespace

TEST(Synthesis, DeterministicAcrossWorkerCounts) {
    const RateModel rates = RateModel::thermal_qubit(0.32812, 402e-6, 0.025, 2);
    SynthesisOptions a;
    a.prep_error = 0.03;
    a.threads = 1;
    SynthesisOptions b = a;
    b.threads = 4;
    const auto x = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {37.5, false},
                                    rates, 500, 99, a);
    const auto y = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {37.5, false},
                                    rates, 500, 99, b);
    EXPECT_EQ(x.i_vals, y.i_vals);
    EXPECT_EQ(x.q_vals, y.q_vals);
    const auto z = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {37.5, false},
                                    rates, 500, 100, a);
    EXPECT_NE(x.i_vals, z.i_vals);
}

TEST(Synthesis, ReferenceChainHasUnitNoise) {
    SynthesisOptions o;
    o.jumps = false;
    const auto batch = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(),
                                        {37.5, false}, RateModel(2), 20000, 3, o);
    EXPECT_NEAR(stdev(batch.i_of(Level::g)), 1.0, 0.02);
    EXPECT_NEAR(stdev(batch.i_of(Level::e)), 1.0, 0.02);
    const auto on = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {1.7, true},
                                     RateModel(2), 20000, 3, o);
    EXPECT_NEAR(stdev(on.q_vals), std::sqrt(1.7 / 37.5), 0.01);
}

TEST(Synthesis, PointersAreRotatedOntoTheIAxis) {
    SynthesisOptions o;
    o.jumps = false;
    const auto batch = synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(),
                                        {1.7, true}, RateModel(2), 5000, 8, o);
    auto q_of = [&](Level l) {
        std::vector<double> q;
        for (auto z : batch.iq_of(l)) {
            q.push_back(z.imag());
        }
        return q;
    };
    EXPECT_NEAR(mean(q_of(Level::e)) - mean(q_of(Level::g)), 0.0, 0.02);
    EXPECT_GT(mean(batch.i_of(Level::e)), mean(batch.i_of(Level::g)));
}

TEST(Synthesis, EmpiricalSnrMatchesModel) {
    SynthesisOptions o;
    o.jumps = false;
    for (double n : {20.0, 112.0}) {
        ReadoutConfig r = jpa_off_readout();
        r.n_bar = n;
        const auto batch = synthesize_batch(kGE, oracle::table_cavity(), r, {37.5, false},
                                            RateModel(2), 20000, 5, o);
        const double want = expected_snr(n, oracle::table_cavity(), r, {37.5, false});
        EXPECT_NEAR(empirical_snr(batch), want, 0.03 * want);
    }
}

TEST(Synthesis, PreparationErrorFlipsTheRequestedFraction) {
    SynthesisOptions o;
    o.jumps = false;
    o.prep_error = 0.1;
    ReadoutConfig r = jpa_off_readout();
    const auto batch = synthesize_batch(kGE, oracle::table_cavity(), r, {1.7, true}, RateModel(2),
                                        20000, 6, o);
    const double mid = 0.5 * (mean(batch.i_of(Level::g)) + mean(batch.i_of(Level::e)));
    const auto ig = batch.i_of(Level::g);
    const double frac =
        static_cast<double>(std::count_if(ig.begin(), ig.end(), [&](double v) { return v > mid; })) /
        static_cast<double>(ig.size());
    EXPECT_NEAR(frac, 0.1, 4.0 * std::sqrt(0.09 / 20000.0));
}

TEST(Synthesis, RejectsBadRequests) {
    const RateModel rates(2);
    EXPECT_THROW(synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {37.5, false},
                                  rates, 0, 1),
                 ParameterError);
    EXPECT_THROW(synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {-1.0, false},
                                  rates, 10, 1),
                 ParameterError);
    SynthesisOptions o;
    o.prep_error = 1.5;
    EXPECT_THROW(synthesize_batch(kGE, oracle::table_cavity(), jpa_off_readout(), {37.5, false},
                                  rates, 10, 1, o),
                 ParameterError);
    ReadoutConfig r = jpa_off_readout();
    r.pulse_len = 1e-6;
    EXPECT_THROW(synthesize_batch(kGE, oracle::table_cavity(), r, {37.5, false}, rates, 10, 1),
                 ParameterError);
}

TEST(Qnd, RepeatedOutcomesAgreeWithoutTransitions) {
    ReadoutConfig r;
    r.n_bar = 126.0;
    r.tau_int = 260e-9;
    r.pulse_len = 340e-9;
    const std::vector<Preparation> preps{Preparation::g, Preparation::e, Preparation::plus};
    SynthesisOptions o;
    o.jumps = false;
    const auto rec = synthesize_qnd(preps, oracle::table_cavity(), r, {1.7, true}, RateModel(2),
                                    4000, 200e-9, 12, o);
    ASSERT_EQ(rec.m1_i.size(), 12000u);
    const std::vector<double> g1(rec.m1_i.begin(), rec.m1_i.begin() + 4000);
    const std::vector<double> e1(rec.m1_i.begin() + 4000, rec.m1_i.begin() + 8000);
    const Threshold thr = optimal_threshold(g1, e1);
    std::vector<int> m1;
    std::vector<int> m2;
    for (std::size_t k = 0; k < rec.m1_i.size(); ++k) {
        m1.push_back(classify(rec.m1_i[k], thr));
        m2.push_back(classify(rec.m2_i[k], thr));
    }
    const QndResult q = qnd_fidelity(m1, m2);
    EXPECT_GT(q.f_q, 0.998);
    double ones = 0.0;
    for (std::size_t k = 8000; k < 12000; ++k) {
        ones += m1[k];
    }
    EXPECT_NEAR(ones / 4000.0, 0.5, 0.03);
}

TEST(Ckp, RidgeSitsAtTheStarkShiftedLine) {
    const CavityParams c = oracle::table_cavity();
    CkpGrid grid;
    grid.resonator_freqs_ghz = {7.1664, 7.1676};
    for (int k = 0; k <= 1000; ++k) {
        grid.qubit_freqs_ghz.push_back(0.328 + 1e-3 * (-5.0 + 0.05 * k));
    }
    const double a = 1500.0;
    const CkpMap m = ckp_map(c, 0.328, a, grid, Level::g, {});
    for (std::size_t r = 0; r < 2; ++r) {
        std::size_t best = 0;
        for (std::size_t q = 0; q < grid.qubit_freqs_ghz.size(); ++q) {
            if (m.at(r, q) > m.at(r, best)) {
                best = q;
            }
        }
        const double n = steady_photon_number(c, Level::g, a, grid.resonator_freqs_ghz[r]);
        EXPECT_NEAR((grid.qubit_freqs_ghz[best] - 0.328) * 1e3, 1.2 * n, 0.05);
    }
    EXPECT_THROW(ckp_map(c, 0.328, a, grid, Level::h, {}), ParameterError);
}
