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

#include "fluxshot/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <openssl/evp.h>

#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

using nlohmann::json;

// Strict view over one JSON object: every key must be declared.
class Obj {
   public:
    Obj(const json& j, std::string where, std::initializer_list<const char*> keys)
        : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            fail("must be an object");
        }
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : j_.items()) {
            if (!allowed.count(item.key())) {
                throw ValidationError("unknown key '" + item.key() + "' in " + where_);
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string path(const char* key) const { return where_ + "." + key; }

    const json& at(const char* key) const {
        if (!j_.contains(key)) {
            throw ValidationError("missing required key '" + std::string(key) + "' in " + where_);
        }
        return j_.at(key);
    }

    double number(const char* key) const {
        const json& v = at(key);
        if (!v.is_number()) {
            throw ValidationError(path(key) + " must be a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ValidationError(path(key) + " must be finite");
        }
        return d;
    }
    double number_or(const char* key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    std::optional<double> opt_number(const char* key) const {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }
    std::uint64_t uinteger(const char* key) const {
        const json& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ValidationError(path(key) + " must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    std::uint64_t uinteger_or(const char* key, std::uint64_t fallback) const {
        return has(key) ? uinteger(key) : fallback;
    }
    bool boolean_or(const char* key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_boolean()) {
            throw ValidationError(path(key) + " must be a boolean");
        }
        return v.get<bool>();
    }
    std::string string(const char* key) const {
        const json& v = at(key);
        if (!v.is_string()) {
            throw ValidationError(path(key) + " must be a string");
        }
        return v.get<std::string>();
    }
    std::vector<double> numbers(const char* key) const {
        const json& v = at(key);
        if (!v.is_array() || v.empty()) {
            throw ValidationError(path(key) + " must be a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
                throw ValidationError(path(key) + " must contain finite numbers only");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }
    const std::string& where() const { return where_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError(where_ + " " + msg);
    }

   private:
    const json& j_;
    std::string where_;
};

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw ValidationError(msg);
    }
}

void require_ascending(const std::vector<double>& v, const std::string& what) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        require(v[k] > v[k - 1], what + " must be strictly ascending");
    }
}

Level level_field(const Obj& o, const char* key) {
    try {
        return parse_level(o.string(key));
    } catch (const LookupError& e) {
        throw ValidationError(o.path(key) + ": " + e.what());
    }
}

Amplifier amplifier_field(const Obj& o, Amplifier fallback) {
    if (!o.has("amplifier")) {
        return fallback;
    }
    const std::string s = o.string("amplifier");
    if (s == "jpa_off") {
        return Amplifier::jpa_off;
    }
    if (s == "jpa_on") {
        return Amplifier::jpa_on;
    }
    throw ValidationError(o.path("amplifier") + " must be 'jpa_off' or 'jpa_on'");
}

double prep_error_field(const Obj& o) {
    const double p = o.number_or("prep_error", 0.0);
    require(p >= 0.0 && p <= 1.0, o.path("prep_error") + " must lie in [0, 1]");
    return p;
}

std::vector<double> microseconds(const Obj& o, const char* key) {
    auto v = o.numbers(key);
    for (double& x : v) {
        require(x > 0.0, o.path(key) + " entries must be positive");
        x *= 1e-6;
    }
    require_ascending(v, o.path(key));
    return v;
}

std::vector<double> targets_field(const Obj& o) {
    if (!o.has("targets")) {
        return {0.005, 0.001};
    }
    auto v = o.numbers("targets");
    for (double t : v) {
        require(t > 0.0 && t < 0.5, o.path("targets") + " entries must lie in (0, 0.5)");
    }
    return v;
}

Experiment parse_experiment(const json& j, std::string& name) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ValidationError("experiment must be an object with a string 'type'");
    }
    name = j.at("type").get<std::string>();
    const std::string where = "experiment(" + name + ")";
    if (name == "single_shot") {
        Obj o(j, where,
              {"type", "amplifier", "prep_error", "jumps", "histogram_bins", "shared_sigma",
               "save_shots"});
        SingleShotExperiment e;
        e.amplifier = amplifier_field(o, Amplifier::jpa_off);
        e.prep_error = prep_error_field(o);
        e.jumps = o.boolean_or("jumps", true);
        e.histogram_bins = o.uinteger_or("histogram_bins", 100);
        require(e.histogram_bins >= 1, o.path("histogram_bins") + " must be at least 1");
        e.shared_sigma = o.boolean_or("shared_sigma", true);
        e.save_shots = o.boolean_or("save_shots", true);
        return e;
    }
    if (name == "qnd") {
        Obj o(j, where, {"type", "amplifier", "prep_error", "jumps", "gap_us"});
        QndExperiment e;
        e.amplifier = amplifier_field(o, Amplifier::jpa_on);
        e.prep_error = prep_error_field(o);
        e.jumps = o.boolean_or("jumps", true);
        e.gap = o.number_or("gap_us", 0.2) * 1e-6;
        require(e.gap >= 0.0, o.path("gap_us") + " must be non-negative");
        return e;
    }
    if (name == "power_sweep") {
        Obj o(j, where,
              {"type", "amplifier", "prep_error", "jumps", "drive_amps", "tau_grid_us", "targets"});
        PowerSweepExperiment e;
        e.amplifier = amplifier_field(o, Amplifier::jpa_off);
        e.prep_error = prep_error_field(o);
        e.jumps = o.boolean_or("jumps", true);
        e.drive_amps = o.numbers("drive_amps");
        for (double a : e.drive_amps) {
            require(a > 0.0, o.path("drive_amps") + " entries must be positive");
        }
        require_ascending(e.drive_amps, o.path("drive_amps"));
        e.tau_grid = microseconds(o, "tau_grid_us");
        e.targets = targets_field(o);
        return e;
    }
    if (name == "time_sweep") {
        Obj o(j, where, {"type", "amplifier", "prep_error", "jumps", "tau_grid_us", "targets"});
        TimeSweepExperiment e;
        e.amplifier = amplifier_field(o, Amplifier::jpa_off);
        e.prep_error = prep_error_field(o);
        e.jumps = o.boolean_or("jumps", true);
        e.tau_grid = microseconds(o, "tau_grid_us");
        e.targets = targets_field(o);
        return e;
    }
    if (name == "backaction") {
        Obj o(j, where, {"type", "prepared", "a_r", "tau_leak_us", "n_traj", "gap_us"});
        BackactionExperiment e;
        e.prepared = o.has("prepared") ? level_field(o, "prepared") : Level::e;
        e.a_r = o.numbers("a_r");
        for (double a : e.a_r) {
            require(a >= 0.0 && a <= 1.5, o.path("a_r") + " entries must lie in [0, 1.5]");
        }
        e.tau_leak = o.numbers("tau_leak_us");
        for (double& t : e.tau_leak) {
            require(t >= 0.0, o.path("tau_leak_us") + " entries must be non-negative");
            t *= 1e-6;
        }
        require_ascending(e.tau_leak, o.path("tau_leak_us"));
        e.n_traj = o.uinteger_or("n_traj", 4000);
        require(e.n_traj >= 1000, o.path("n_traj") + " must be at least 1000");
        e.gap = o.number_or("gap_us", 0.2) * 1e-6;
        require(e.gap >= 0.0, o.path("gap_us") + " must be non-negative");
        return e;
    }
    if (name == "ckp") {
        Obj o(j, where,
              {"type", "n_bar_peak", "resonator_span_mhz", "resonator_points",
               "qubit_offset_min_mhz", "qubit_offset_max_mhz", "qubit_points", "linewidth_mhz",
               "noise"});
        CkpExperiment e;
        e.n_bar_peak = o.number_or("n_bar_peak", e.n_bar_peak);
        require(e.n_bar_peak >= 0.0, o.path("n_bar_peak") + " must be non-negative");
        e.resonator_span_mhz = o.number_or("resonator_span_mhz", e.resonator_span_mhz);
        require(e.resonator_span_mhz > 0.0, o.path("resonator_span_mhz") + " must be positive");
        e.resonator_points = o.uinteger_or("resonator_points", e.resonator_points);
        require(e.resonator_points >= 5, o.path("resonator_points") + " must be at least 5");
        e.qubit_offset_min_mhz = o.number_or("qubit_offset_min_mhz", e.qubit_offset_min_mhz);
        e.qubit_offset_max_mhz = o.number_or("qubit_offset_max_mhz", e.qubit_offset_max_mhz);
        require(e.qubit_offset_max_mhz > e.qubit_offset_min_mhz,
                where + " qubit offset range must be ascending");
        e.qubit_points = o.uinteger_or("qubit_points", e.qubit_points);
        require(e.qubit_points >= 5, o.path("qubit_points") + " must be at least 5");
        e.linewidth_mhz = o.number_or("linewidth_mhz", e.linewidth_mhz);
        require(e.linewidth_mhz > 0.0, o.path("linewidth_mhz") + " must be positive");
        e.noise = o.number_or("noise", 0.0);
        require(e.noise >= 0.0, o.path("noise") + " must be non-negative");
        return e;
    }
    if (name == "reset") {
        Obj o(j, where,
              {"type", "sideband_rate_per_us", "duration_us", "cavity_kappa_per_us",
               "rethermalization_rate_per_s", "qubit_decay_rate_per_s"});
        ResetExperiment e;
        e.sideband_rate = o.number("sideband_rate_per_us") * 1e6;
        e.duration = o.number("duration_us") * 1e-6;
        require(e.sideband_rate >= 0.0, o.path("sideband_rate_per_us") + " must be non-negative");
        require(e.duration > 0.0, o.path("duration_us") + " must be positive");
        if (auto k = o.opt_number("cavity_kappa_per_us")) {
            require(*k > 0.0, o.path("cavity_kappa_per_us") + " must be positive");
            e.cavity_kappa = *k * 1e6;
        }
        e.rethermalization_rate = o.opt_number("rethermalization_rate_per_s");
        e.qubit_decay_rate = o.opt_number("qubit_decay_rate_per_s");
        for (auto v : {e.rethermalization_rate, e.qubit_decay_rate}) {
            require(!v || *v >= 0.0, where + " rates must be non-negative");
        }
        return e;
    }
    if (name == "efficiency") {
        Obj o(j, where, {"type", "amplifier", "n_bar_grid", "injected_n_n", "jumps"});
        EfficiencyExperiment e;
        e.amplifier = amplifier_field(o, Amplifier::jpa_off);
        e.n_bar_grid = o.numbers("n_bar_grid");
        for (double n : e.n_bar_grid) {
            require(n > 0.0, o.path("n_bar_grid") + " entries must be positive");
        }
        require_ascending(e.n_bar_grid, o.path("n_bar_grid"));
        require(e.n_bar_grid.size() >= 4, o.path("n_bar_grid") + " needs at least 4 points");
        e.injected_n_n = o.opt_number("injected_n_n");
        require(!e.injected_n_n || *e.injected_n_n > 0.0,
                o.path("injected_n_n") + " must be positive");
        e.jumps = o.boolean_or("jumps", false);
        return e;
    }
    throw ValidationError("unknown experiment type '" + name + "'");
}

}  // namespace

std::string amplifier_name(Amplifier amp) {
    return amp == Amplifier::jpa_on ? "jpa_on" : "jpa_off";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(kHex[digest[k] >> 4]);
        out.push_back(kHex[digest[k] & 0xF]);
    }
    return out;
}

double ScenarioConfig::qubit_freq_ghz() const {
    if (qubit_freq_override_ghz) {
        return *qubit_freq_override_ghz;
    }
    return diagonalize(fluxonium, basis_size).transition(Level::g, Level::e);
}

RateModel ScenarioConfig::rate_model() const {
    RateModel model = RateModel::thermal_qubit(qubit_freq_ghz(), coherence.t1 * t1_readout_factor,
                                               temperature, num_levels);
    for (const auto& [pair, rate] : base_rates) {
        model.set_base_rate(pair.first, pair.second, rate);
    }
    for (const auto& term : mist) {
        model.add_mist(term);
    }
    return model;
}

ScenarioConfig parse_scenario(const nlohmann::json& doc) {
    Obj top(doc, "config",
            {"version", "seed", "n_shots", "output_dir", "device", "rates", "readout", "noise",
             "experiment", "description"});
    require(top.uinteger("version") == 1, "config.version must be 1");
    ScenarioConfig cfg;
    cfg.seed = top.uinteger("seed");
    cfg.n_shots = top.uinteger("n_shots");
    require(cfg.n_shots >= 500, "config.n_shots must be at least 500 per prepared state");
    require(cfg.n_shots >= 1, "config.n_shots must be at least 1");
    cfg.output_dir = top.has("output_dir") ? top.string("output_dir") : std::string("runs");
    if (top.has("description")) {
        top.string("description");
    }

    Obj device(top.at("device"), "device",
               {"fluxonium", "basis_size", "qubit_freq_ghz", "cavity", "coherence",
                "temperature_mk"});
    Obj flux(device.at("fluxonium"), "device.fluxonium",
             {"e_j_ghz", "e_c_ghz", "e_l_ghz", "phi_ext_rad"});
    cfg.fluxonium = {flux.number("e_j_ghz"), flux.number("e_c_ghz"), flux.number("e_l_ghz"),
                     flux.number("phi_ext_rad")};
    cfg.basis_size = static_cast<int>(device.uinteger_or("basis_size", 60));
    require(cfg.basis_size >= 20, "device.basis_size must be at least 20");
    cfg.qubit_freq_override_ghz = device.opt_number("qubit_freq_ghz");
    require(!cfg.qubit_freq_override_ghz || *cfg.qubit_freq_override_ghz > 0.0,
            "device.qubit_freq_ghz must be positive");

    Obj cav(device.at("cavity"), "device.cavity",
            {"omega_r_ghz", "kappa_s_mhz", "kappa_w_mhz", "kappa_int_mhz", "chi_mhz"});
    cfg.cavity.omega_r_ghz = cav.number("omega_r_ghz");
    cfg.cavity.kappa_s_mhz = cav.number("kappa_s_mhz");
    cfg.cavity.kappa_w_mhz = cav.number_or("kappa_w_mhz", 0.0);
    cfg.cavity.kappa_int_mhz = cav.number_or("kappa_int_mhz", 0.0);
    const json& chi = cav.at("chi_mhz");
    require(chi.is_object(), "device.cavity.chi_mhz must be an object");
    for (const auto& item : chi.items()) {
        Level level;
        try {
            level = parse_level(item.key());
        } catch (const LookupError&) {
            throw ValidationError("unknown level '" + item.key() + "' in device.cavity.chi_mhz");
        }
        require(item.value().is_number() && std::isfinite(item.value().get<double>()),
                "device.cavity.chi_mhz values must be finite numbers");
        cfg.cavity.chi_mhz[level] = item.value().get<double>();
    }

    Obj coh(device.at("coherence"), "device.coherence", {"t1_us", "t2r_us", "t2e_us"});
    cfg.coherence.t1 = coh.number("t1_us") * 1e-6;
    cfg.coherence.t2r = coh.number_or("t2r_us", 0.0) * 1e-6;
    cfg.coherence.t2e = coh.number_or("t2e_us", 0.0) * 1e-6;
    require(cfg.coherence.t1 > 0.0, "device.coherence.t1_us must be positive");
    require(cfg.coherence.t2r >= 0.0 && cfg.coherence.t2e >= 0.0,
            "device.coherence T2 values must be non-negative");
    cfg.temperature = device.number("temperature_mk") * 1e-3;
    require(cfg.temperature >= 0.0, "device.temperature_mk must be non-negative");

    Obj rates(top.at("rates"), "rates", {"num_levels", "t1_readout_factor", "base", "mist"});
    cfg.num_levels = rates.uinteger_or("num_levels", 2);
    require(cfg.num_levels >= 2 && cfg.num_levels <= kMaxLevels,
            "rates.num_levels must lie in [2, 5]");
    cfg.t1_readout_factor = rates.number_or("t1_readout_factor", 1.0);
    require(cfg.t1_readout_factor > 0.0, "rates.t1_readout_factor must be positive");
    std::set<Level> referenced{Level::g, Level::e};
    auto check_level = [&](Level l, const std::string& where) {
        require(index_of(l) < cfg.num_levels,
                where + ": level " + std::string(level_name(l)) + " exceeds rates.num_levels");
        referenced.insert(l);
    };
    if (rates.has("base")) {
        const json& arr = rates.at("base");
        require(arr.is_array(), "rates.base must be an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string where = "rates.base[" + std::to_string(k) + "]";
            Obj e(arr[k], where, {"from", "to", "rate_per_s"});
            const Level from = level_field(e, "from");
            const Level to = level_field(e, "to");
            require(from != to, where + " needs distinct levels");
            check_level(from, where);
            check_level(to, where);
            const double r = e.number("rate_per_s");
            require(r >= 0.0, where + ".rate_per_s must be non-negative");
            cfg.base_rates.push_back({{from, to}, r});
        }
    }
    if (rates.has("mist")) {
        const json& arr = rates.at("mist");
        require(arr.is_array(), "rates.mist must be an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string where = "rates.mist[" + std::to_string(k) + "]";
            Obj e(arr[k], where, {"from", "to", "c_per_s", "p"});
            MistTerm term{level_field(e, "from"), level_field(e, "to"), e.number("c_per_s"),
                          e.number("p")};
            require(term.from != term.to, where + " needs distinct levels");
            check_level(term.from, where);
            check_level(term.to, where);
            require(term.c >= 0.0, where + ".c_per_s must be non-negative");
            require(term.p > 0.0, where + ".p must be positive");
            cfg.mist.push_back(term);
        }
    }
    for (Level l : referenced) {
        require(cfg.cavity.chi_mhz.count(l) == 1,
                "level " + std::string(level_name(l)) +
                    " is referenced but has no entry in device.cavity.chi_mhz");
    }

    Obj ro(top.at("readout"), "readout",
           {"drive_freq_ghz", "n_bar", "tau_int_us", "pulse_len_us", "f_factor_db", "demod"});
    cfg.readout.drive_freq_ghz = ro.number("drive_freq_ghz");
    cfg.readout.n_bar = ro.number("n_bar");
    cfg.readout.tau_int = ro.number("tau_int_us") * 1e-6;
    cfg.readout.pulse_len = ro.has("pulse_len_us") ? ro.number("pulse_len_us") * 1e-6
                                                   : cfg.readout.tau_int + 200e-9;
    cfg.readout.f_factor_db = ro.number_or("f_factor_db", -11.67);
    const std::string demod = ro.has("demod") ? ro.string("demod") : std::string("boxcar");
    require(demod == "boxcar" || demod == "matched", "readout.demod must be boxcar or matched");
    cfg.readout.demod = demod == "matched" ? Demod::matched : Demod::boxcar;

    Obj noise(top.at("noise"), "noise", {"jpa_off", "jpa_on"});
    Obj off(noise.at("jpa_off"), "noise.jpa_off", {"n_n"});
    Obj on(noise.at("jpa_on"), "noise.jpa_on", {"n_n"});
    cfg.jpa_off = {off.number("n_n"), false};
    cfg.jpa_on = {on.number("n_n"), true};

    cfg.experiment = parse_experiment(top.at("experiment"), cfg.experiment_name);

    try {
        cfg.fluxonium.validate();
        cfg.cavity.validate();
        cfg.readout.validate();
        cfg.jpa_off.validate();
        cfg.jpa_on.validate();
        if (const auto* r = std::get_if<ResetExperiment>(&cfg.experiment)) {
            sideband_frequency(cfg.cavity.omega_r_ghz, cfg.qubit_freq_ghz());
            (void)r;
        }
        cfg.rate_model();
        if (cfg.temperature <= 0.0 && std::holds_alternative<ResetExperiment>(cfg.experiment)) {
            throw ParameterError("reset experiment needs a positive temperature");
        }
    } catch (const ParameterError& e) {
        throw ValidationError(std::string("invalid parameters: ") + e.what());
    } catch (const LookupError& e) {
        throw ValidationError(std::string("invalid parameters: ") + e.what());
    }

    cfg.canonical = doc;
    cfg.canonical.erase("output_dir");
    cfg.config_hash = sha256_hex(cfg.canonical.dump());
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read config file " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_scenario(doc);
}

}  // namespace fluxshot
