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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxshot/analysis.h"
#include "fluxshot/dynamics.h"
#include "fluxshot/experiments.h"
#include "fluxshot/model.h"
#include "fluxshot/parallel.h"
#include "fluxshot/rng.h"
#include "fluxshot/scenario.h"
#include "oracles.h"

using namespace fluxshot;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = FLUXSHOT_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    template <typename T>
    Detail& operator<<(const T& v) {
        out_ << v;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_ = [] {
        std::ostringstream o;
        o.precision(6);
        return o;
    }();
};

json load(const std::string& name) {
    std::ifstream in(kConfigs / name);
    return json::parse(in);
}

std::map<std::string, std::string> run(const json& doc) {
    std::map<std::string, std::string> out;
    for (auto& f : run_experiment(parse_scenario(doc), {})) {
        out.emplace(f.name, std::move(f.content));
    }
    return out;
}

std::vector<std::map<std::string, double>> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) {
            header.push_back(c);
        }
    }
    std::vector<std::map<std::string, double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string c;
        std::map<std::string, double> row;
        for (std::size_t k = 0; k < header.size() && std::getline(ls, c, ','); ++k) {
            row[header[k]] = std::strtod(c.c_str(), nullptr);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome spectrum() {
    const EnergySpectrum s = diagonalize({4.098, 0.754, 0.998, oracle::kPi});
    const double ge = s.transition(Level::g, Level::e);
    const double ef = s.transition(Level::e, Level::f);
    const double gh = s.transition(Level::g, Level::h);
    const double ei = s.transition(Level::e, Level::i);
    const bool ok = std::abs(ge / 0.32812 - 1.0) < 0.02 && std::abs(ef / 3.062 - 1.0) < 0.02 &&
                    std::min(gh, ei) < 7.167 && std::max(gh, ei) > 7.167;
    return {ok, (Detail() << "f_ge=" << ge << " GHz f_ef=" << ef << " GHz f_gh=" << gh
                          << " GHz f_ei=" << ei << " GHz")
                    .str()};
}

Outcome thermal() {
    const double p = thermal_population(0.32812, 0.025);
    const double t = effective_temperature(0.03, 0.32812);
    const bool ok = std::abs(p - 0.35) <= 0.01 && t >= 0.004 && t <= 0.006;
    return {ok, (Detail() << "p_e(25 mK)=" << p << " T(p_e=0.03)=" << t * 1e3 << " mK").str()};
}

Outcome identities() {
    const double eta_off = efficiency_from_noise(37.5);
    const double t_off = noise_temperature(37.5, 7.167);
    const double eta_on = efficiency_from_noise(1.7);
    const double t_on = noise_temperature(1.7, 7.167);
    const bool ok = std::abs(eta_off - 0.027) <= 0.001 && std::abs(t_off - 12.9) <= 0.2 &&
                    std::abs(t_on - 0.6) <= 0.05 && eta_on >= 0.57 && eta_on <= 0.59;
    return {ok, (Detail() << "eta=" << eta_off << "/" << eta_on << " T_n,eff=" << t_off << "/"
                          << t_on << " K")
                    .str()};
}

Outcome snr_round_trip() {
    Detail d;
    bool ok = true;
    for (const char* name : {"efficiency_jpa_off.json", "efficiency_jpa_on.json"}) {
        const json doc = load(name);
        const json fit = json::parse(run(doc).at("efficiency_fit.json"));
        const double injected = fit["injected_n_n"];
        const double n_n = fit["n_n"];
        const double r2 = fit["r_squared"];
        ok = ok && doc["n_shots"].get<int>() >= 100000 &&
             doc["experiment"]["n_bar_grid"].size() == 5 && std::abs(n_n / injected - 1.0) < 0.05 &&
             r2 > 0.99;
        d << "n_n " << injected << "->" << n_n << " (R2=" << r2 << ") ";
    }
    return {ok, d.str()};
}

std::vector<double> gaussian(std::size_t n, double mu, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(mu, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = dist(gen);
    }
    return v;
}

Outcome eps_oracle() {
    Detail d;
    bool ok = true;
    std::uint64_t seed = 100;
    for (double snr : {0.02, 0.3, 1.0, 2.0, 3.0, 3.7}) {
        const auto g = gaussian(100000, 0.0, seed++);
        const auto e = gaussian(100000, 2.0 * snr, seed++);
        const MixtureFit fg = fit_mixture(g, {}, snr, Level::g);
        const MixtureFit fe = fit_mixture(e, {}, snr, Level::e);
        const Threshold th = optimal_threshold(fg, fe);
        const double got = epsilon_snr(fg, fe, th);
        const double want = oracle::gaussian_error(snr);
        const double rel = std::abs(got / want - 1.0);
        ok = ok && rel < 0.1;
        d << "eps " << want << " rel " << rel << "; ";
    }
    return {ok, d.str()};
}

Outcome formulas() {
    const double fq = qnd_fidelity(0.995, 0.997);
    const double f = assignment_fidelity(0.995, 0.997);
    const bool ok = std::abs(fq - 0.996) < 1e-12 && std::abs(f - 0.996) < 1e-12;
    return {ok, (Detail() << "F_Q=" << fq << " F=" << f).str()};
}

Outcome operating_points() {
    const json off = json::parse(run(load("single_shot_jpa_off.json")).at("fidelity_report.json"));
    const json on = json::parse(run(load("single_shot_jpa_on.json")).at("fidelity_report.json"));
    const double f_off = off["fidelity"];
    const double f_on = on["fidelity"];
    const bool ok = f_off >= 0.95 && f_off <= 0.97 && f_on >= 0.965 && f_on <= 0.985;
    return {ok, (Detail() << "F(JPA off)=" << f_off << " F(JPA on)=" << f_on).str()};
}

Outcome qnd_markov() {
    json doc = load("qnd.json");
    doc["rates"]["num_levels"] = 2;
    doc["rates"]["mist"] = json::array();
    doc["rates"]["base"] = json::array({{{"from", "g"}, {"to", "e"}, {"rate_per_s", 2.0e4}},
                                        {{"from", "e"}, {"to", "g"}, {"rate_per_s", 3.0e4}}});
    doc["noise"]["jpa_on"]["n_n"] = 0.05;
    const ScenarioConfig cfg = parse_scenario(doc);
    const RateModel rates = cfg.rate_model();
    const double up = rates.base_rate(Level::g, Level::e);
    const double down = rates.base_rate(Level::e, Level::g);
    const double dt = cfg.readout.pulse_len + doc["experiment"]["gap_us"].get<double>() * 1e-6;
    const double relax = std::exp(-(up + down) * dt);
    const double pi_g = down / (up + down);
    const double stay_g = pi_g + (1.0 - pi_g) * relax;
    const double stay_e = (1.0 - pi_g) + pi_g * relax;

    const json q = json::parse(run(doc).at("qnd_report.json"));
    const double p00 = q["p00"];
    const double p11 = q["p11"];
    const double n0 = q["n_m1_0"];
    const double n1 = q["n_m1_1"];
    const double z0 = (p00 - stay_g) / std::sqrt(stay_g * (1.0 - stay_g) / n0);
    const double z1 = (p11 - stay_e) / std::sqrt(stay_e * (1.0 - stay_e) / n1);

    const json anchored = json::parse(run(load("qnd.json")).at("qnd_report.json"));
    const double fq = anchored["f_q"];
    const bool ok = q["n_per_preparation"].get<int>() >= 10000 && std::abs(z0) < 3.0 &&
                    std::abs(z1) < 3.0 && fq >= 0.99 && fq <= 1.0;
    return {ok, (Detail() << "P(0|0)=" << p00 << " vs " << stay_g << " (" << z0
                          << " sigma), P(1|1)=" << p11 << " vs " << stay_e << " (" << z1
                          << " sigma), anchored F_Q=" << fq)
                    .str()};
}

template <typename Key>
std::map<double, double> best_by(const std::vector<std::map<std::string, double>>& rows,
                                 const Key& column) {
    std::map<double, double> best;
    for (const auto& r : rows) {
        const double n = r.at("n_bar");
        const double v = r.at(column);
        auto [it, fresh] = best.emplace(n, v);
        if (!fresh) {
            it->second = std::min(it->second, v);
        }
    }
    return best;
}

Outcome phenomenology() {
    Detail d;
    const auto sweep = run(load("power_sweep.json"));
    const auto rows = parse_csv(sweep.at("power_sweep.csv"));
    const auto total = best_by(rows, "total_error");
    const auto eps = best_by(rows, "eps_snr");
    auto argmin = std::min_element(total.begin(), total.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
    const bool interior = argmin != total.begin() && std::next(argmin) != total.end();
    const double eps_at_min = eps.at(argmin->first);
    const double eps_high = eps.rbegin()->second;
    const bool a = interior && eps_high > eps_at_min;
    d << "(a) min total error " << argmin->second << " at n=" << argmin->first
      << ", eps_snr " << eps_at_min << " -> " << eps_high << " at n=" << eps.rbegin()->first;

    const auto blobs = parse_csv(sweep.at("blob_means.csv"));
    std::size_t peak = 0;
    for (std::size_t k = 1; k < blobs.size(); ++k) {
        if (blobs[k].at("separation") > blobs[peak].at("separation")) {
            peak = k;
        }
    }
    const bool b = peak > 0 && peak + 1 < blobs.size() &&
                   blobs.back().at("separation") < blobs[peak].at("separation");
    d << "; (b) separation peak " << blobs[peak].at("separation") << " at n="
      << blobs[peak].at("n_bar") << ", last " << blobs.back().at("separation");

    const json ba = json::parse(run(load("backaction.json")).at("backaction_fit.json"));
    std::map<double, json> fits;
    for (const auto& f : ba["fits"]) {
        fits[f["a_r"].get<double>()] = f;
    }
    const double r0 = fits.at(0.0)["decay_rate_per_us"];
    const double r3 = fits.at(0.3)["decay_rate_per_us"];
    bool saturates = true;
    for (const auto& [ar, f] : fits) {
        if (ar >= 0.8) {
            saturates = saturates && f["saturation"].get<double>() > 0.5;
        }
    }
    const bool c = r3 > r0 && saturates && fits.rbegin()->first >= 0.8;
    d << "; (c) decay " << r0 << " -> " << r3 << " /us, saturation(a_r=0.8)="
      << fits.at(0.8)["saturation"].get<double>();
    return {a && b && c, d.str()};
}

Outcome ckp() {
    const json doc = load("ckp.json");
    const json r = json::parse(run(doc).at("ckp_report.json"));
    const double chi = r["chi_ge_mhz"];
    const double nb = r["n_bar_peak"];
    const bool ok = std::abs(r["true_chi_ge_mhz"].get<double>() - 1.2) < 1e-9 &&
                    std::abs(r["true_n_bar_peak"].get<double>() - 27.0) < 1e-9 &&
                    std::abs(chi / 1.2 - 1.0) < 0.02 && std::abs(nb - 27.0) <= 1.0;
    return {ok, (Detail() << "chi_ge=" << chi << " MHz n_bar=" << nb).str()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
            files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
        }
    }
    return files;
}

Outcome determinism() {
    const fs::path base = fs::temp_directory_path() / "fluxshot_acceptance_determinism";
    fs::remove_all(base);
    std::map<std::string, std::string> reference;
    Detail d;
    bool ok = true;
    for (const char* workers : {"1", "4", "8"}) {
        const fs::path out = base / workers;
        for (const char* cfg : {"single_shot_jpa_off.json", "qnd.json"}) {
            const std::string cmd = std::string("FLUXSHOT_THREADS=") + workers + " " +
                                    FLUXSHOT_CLI_PATH + " run " + (kConfigs / cfg).string() +
                                    " -o " + out.string() + " >/dev/null";
            ok = ok && std::system(cmd.c_str()) == 0;
        }
        const auto files = tree(out);
        if (reference.empty()) {
            reference = files;
            d << reference.size() << " files";
        } else {
            ok = ok && files == reference;
            d << ", workers " << workers << (files == reference ? " identical" : " DIFFER");
        }
    }
    ok = ok && !reference.empty();
    fs::remove_all(base);
    return {ok, d.str()};
}

Outcome oracle_equivalence() {
    double worst = 0.0;
    for (std::uint64_t model = 0; model < 20; ++model) {
        std::mt19937_64 gen(5000 + model);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RateModel m(4);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                if (i != j && u(gen) < 0.75) {
                    m.set_base_rate(level_from_index(i), level_from_index(j), 1e5 * u(gen));
                }
            }
        }
        const Level start = level_from_index(model % 4);
        const double t = 3e-6 + 2e-6 * u(gen);
        const PhotonSchedule photons = PhotonSchedule::constant(0.0, t);
        const std::size_t n = 100000;
        std::vector<int> final_level(n);
        parallel_for(n, [&](std::size_t k) {
            Rng rng = make_stream(7000 + model, k);
            final_level[k] = static_cast<int>(index_of(evolve(start, m, photons, t, rng).final_level()));
        });
        Eigen::VectorXd mc = Eigen::VectorXd::Zero(4);
        for (int l : final_level) {
            mc[l] += 1.0 / static_cast<double>(n);
        }
        Eigen::VectorXd p0 = Eigen::VectorXd::Zero(4);
        p0[static_cast<Eigen::Index>(index_of(start))] = 1.0;
        const Eigen::VectorXd me = oracle::propagate(m.generator(0.0), p0, t);
        worst = std::max(worst, 0.5 * (mc - me).cwiseAbs().sum());
    }
    return {worst < 0.01, (Detail() << "max TV over 20 models = " << worst).str()};
}

struct Criterion {
    int number;
    std::string title;
    double budget_s;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "spectrum consistency", 5.0, spectrum},
        {2, "thermal round trip", 1.0, thermal},
        {3, "efficiency and noise identities", 1.0, identities},
        {4, "SNR round trip", 120.0, snr_round_trip},
        {5, "eps_snr oracle", 60.0, eps_oracle},
        {6, "fidelity formulas", 1.0, formulas},
        {7, "end-to-end operating points", 60.0, operating_points},
        {8, "QND protocol vs two-state Markov", 60.0, qnd_markov},
        {9, "sweep phenomenology", 540.0, phenomenology},
        {10, "CKP round trip", 60.0, ckp},
        {11, "determinism across workers", 120.0, determinism},
        {12, "Monte-Carlo vs master equation", 300.0, oracle_equivalence},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.number,
                    c.title.c_str(), o.detail.c_str(), secs, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
