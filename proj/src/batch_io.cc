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

#include "fluxshot/batch_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fluxshot/errors.h"

namespace fluxshot {

std::string format_shortest(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[512];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int digits) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[512];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
    std::string out(buf, res.ptr);
    if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') {
        out.erase(0, 1);
    }
    return out;
}

double parse_double(std::string_view text) {
    if (text == "nan") {
        return std::nan("");
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError("malformed number '" + std::string(text) + "'");
    }
    return value;
}

nlohmann::json to_json(const ReadoutConfig& cfg) {
    return {{"drive_freq_ghz", cfg.drive_freq_ghz},
            {"n_bar", cfg.n_bar},
            {"tau_int_s", cfg.tau_int},
            {"pulse_len_s", cfg.pulse_len},
            {"f_factor_db", cfg.f_factor_db},
            {"demod", cfg.demod == Demod::matched ? "matched" : "boxcar"}};
}

nlohmann::json to_json(const NoiseConfig& noise) {
    return {{"n_n", noise.n_n}, {"jpa_on", noise.jpa_on}};
}

ReadoutConfig readout_from_json(const nlohmann::json& j) {
    ReadoutConfig cfg;
    cfg.drive_freq_ghz = j.at("drive_freq_ghz").get<double>();
    cfg.n_bar = j.at("n_bar").get<double>();
    cfg.tau_int = j.at("tau_int_s").get<double>();
    cfg.pulse_len = j.at("pulse_len_s").get<double>();
    cfg.f_factor_db = j.at("f_factor_db").get<double>();
    const auto demod = j.at("demod").get<std::string>();
    if (demod == "matched") {
        cfg.demod = Demod::matched;
    } else if (demod == "boxcar") {
        cfg.demod = Demod::boxcar;
    } else {
        throw ValidationError("unknown demod '" + demod + "'");
    }
    return cfg;
}

NoiseConfig noise_from_json(const nlohmann::json& j) {
    NoiseConfig noise;
    noise.n_n = j.at("n_n").get<double>();
    noise.jpa_on = j.at("jpa_on").get<bool>();
    return noise;
}

std::string batch_csv(const ShotBatch& batch) {
    std::string out = "prepared,label_int,I,Q\n";
    for (std::size_t k = 0; k < batch.size(); ++k) {
        out += std::string(level_name(batch.prepared[k])) + ',' +
               std::to_string(index_of(batch.prepared[k])) + ',' +
               format_shortest(batch.i_vals[k]) + ',' + format_shortest(batch.q_vals[k]) + '\n';
    }
    return out;
}

std::string batch_sidecar(const ShotBatch& batch) {
    const nlohmann::json j = {{"format", "fluxshot-batch"},
                              {"n_shots", batch.size()},
                              {"readout", to_json(batch.config)},
                              {"noise", to_json(batch.noise)},
                              {"seed", batch.seed},
                              {"reference_n_n", batch.reference_n_n},
                              {"rotation", batch.rotation}};
    return j.dump(2) + "\n";
}

void write_batch(const ShotBatch& batch, const std::filesystem::path& base) {
    std::filesystem::path csv = base;
    csv += ".csv";
    std::filesystem::path side = base;
    side += ".json";
    std::ofstream out(csv, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + csv.string());
    }
    out << batch_csv(batch);
    std::ofstream js(side, std::ios::binary);
    js << batch_sidecar(batch);
    if (!out || !js) {
        throw ValidationError("cannot write batch " + base.string());
    }
}

ShotBatch read_batch(const std::filesystem::path& base) {
    std::filesystem::path csv = base;
    csv += ".csv";
    std::filesystem::path side = base;
    side += ".json";
    std::ifstream js(side, std::ios::binary);
    if (!js) {
        throw ValidationError("missing sidecar " + side.string());
    }
    const nlohmann::json j = nlohmann::json::parse(js);
    ShotBatch batch;
    batch.config = readout_from_json(j.at("readout"));
    batch.noise = noise_from_json(j.at("noise"));
    batch.seed = j.at("seed").get<std::uint64_t>();
    batch.reference_n_n = j.at("reference_n_n").get<double>();
    batch.rotation = j.at("rotation").get<double>();

    std::ifstream in(csv, std::ios::binary);
    if (!in) {
        throw ValidationError("missing batch file " + csv.string());
    }
    std::string line;
    std::getline(in, line);
    if (line != "prepared,label_int,I,Q") {
        throw ValidationError("unexpected batch header in " + csv.string());
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::string_view rest(line);
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if ((f < 3) == (comma == std::string_view::npos)) {
                throw ValidationError("malformed batch row: " + line);
            }
            fields[f] = rest.substr(0, comma);
            rest = f < 3 ? rest.substr(comma + 1) : std::string_view{};
        }
        const Level level = parse_level(fields[0]);
        if (parse_double(fields[1]) != static_cast<double>(index_of(level))) {
            throw ValidationError("label mismatch in batch row: " + line);
        }
        batch.prepared.push_back(level);
        batch.i_vals.push_back(parse_double(fields[2]));
        batch.q_vals.push_back(parse_double(fields[3]));
    }
    if (batch.size() != j.at("n_shots").get<std::size_t>()) {
        throw ValidationError("batch row count disagrees with sidecar");
    }
    return batch;
}

}  // namespace fluxshot
