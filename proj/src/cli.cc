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

#include "fluxshot/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "fluxshot/batch_io.h"
#include "fluxshot/errors.h"
#include "fluxshot/experiments.h"
#include "fluxshot/output.h"
#include "fluxshot/parallel.h"

namespace fluxshot {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
}

struct LoadedConfig {
    std::string text;
    ScenarioConfig cfg;
};

LoadedConfig load(const fs::path& path, const std::optional<fs::path>& output_dir) {
    LoadedConfig out;
    out.text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(out.text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
    out.cfg = parse_scenario(doc);
    if (output_dir) {
        out.cfg.output_dir = *output_dir;
    }
    return out;
}

// Writes the files and a manifest covering them.
void emit(const fs::path& dir, const ScenarioConfig& cfg, std::vector<OutputFile> files,
          OrderedJson extra, double seconds) {
    std::sort(files.begin(), files.end(),
              [](const OutputFile& a, const OutputFile& b) { return a.name < b.name; });
    fs::create_directories(dir);
    OrderedJson listing = OrderedJson::array();
    for (const OutputFile& f : files) {
        const fs::path target = dir / fs::path(f.name);
        fs::create_directories(target.parent_path());
        write_file(target, f.content);
        OrderedJson entry;
        entry["path"] = f.name;
        entry["sha256"] = sha256_hex(f.content);
        entry["bytes"] = f.content.size();
        listing.push_back(entry);
    }
    OrderedJson m;
    m["artifact_version"] = kArtifactVersion;
    m["config_hash"] = cfg.config_hash;
    m["seed"] = cfg.seed;
    m["experiment"] = cfg.experiment_name;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        m[it.key()] = it.value();
    }
    m["workers"] = worker_count(0);
    m["wall_clock_s"] = seconds;
    m["files"] = listing;
    write_file(dir / "manifest.json", dump_fixed(m));
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string grid_text(const std::vector<double>& grid) {
    std::string s;
    for (double v : grid) {
        s += format_shortest(v) + ";";
    }
    return s;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            row.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

OrderedJson csv_json(const std::string& text) {
    const auto rows = parse_csv(text);
    OrderedJson j;
    j["columns"] = rows.empty() ? OrderedJson::array() : OrderedJson(rows.front());
    OrderedJson data = OrderedJson::array();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        OrderedJson row = OrderedJson::array();
        for (const std::string& cell : rows[r]) {
            try {
                row.push_back(parse_double(cell));
            } catch (const Error&) {
                row.push_back(cell);
            }
        }
        data.push_back(row);
    }
    j["rows"] = data;
    return j;
}

const std::set<std::string> kUnmergedTables{"shots.csv", "qnd_records.csv", "ckp_maps.csv"};

OrderedJson json_or_null(const OrderedJson& j, const char* key) {
    return j.contains(key) ? j.at(key) : OrderedJson(nullptr);
}

std::string md_value(const OrderedJson& v) {
    if (v.is_number()) {
        return format_fixed(v.get<double>(), 4);
    }
    if (v.is_null()) {
        return "n/a";
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

}  // namespace

fs::path run_directory(const ScenarioConfig& cfg) {
    return cfg.output_dir / cfg.experiment_name / cfg.config_hash.substr(0, 16);
}

fs::path execute_run(const RunRequest& request) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedConfig loaded = load(request.config, request.output_dir);
    RunOptions options;
    options.svg = request.svg;
    std::vector<OutputFile> files = run_experiment(loaded.cfg, options);
    files.push_back({"config.json", loaded.text});
    const fs::path dir = run_directory(loaded.cfg);
    OrderedJson extra;
    extra["kind"] = "run";
    emit(dir, loaded.cfg, std::move(files), extra, elapsed(start));
    return dir;
}

SweepOutcome execute_sweep(const SweepRequest& request, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    if (request.axis != "drive_amp" && request.axis != "tau_int") {
        throw ValidationError("sweep axis must be drive_amp or tau_int, got '" + request.axis +
                              "'");
    }
    if (request.grid.empty()) {
        throw ValidationError("sweep grid is empty");
    }
    for (std::size_t k = 0; k < request.grid.size(); ++k) {
        if (!std::isfinite(request.grid[k]) || request.grid[k] <= 0.0) {
            throw ValidationError("sweep grid values must be finite and positive");
        }
        if (k > 0 && request.grid[k] <= request.grid[k - 1]) {
            throw ValidationError("sweep grid must be strictly ascending");
        }
    }
    const LoadedConfig loaded = load(request.config, request.output_dir);
    const ScenarioConfig& cfg = loaded.cfg;
    const ShotSettings settings = shot_settings(cfg);

    std::vector<OutputFile> files;
    CsvTable table({"point", request.axis, "n_bar", "tau_int_us", "fidelity", "total_error",
                    "eps_snr", "eps_prep_mix", "snr", "threshold", "status"});
    std::vector<double> xs;
    std::vector<double> err_total;
    std::vector<double> eps;
    std::vector<double> taus;
    std::size_t warnings = 0;
    for (std::size_t k = 0; k < request.grid.size(); ++k) {
        const double v = request.grid[k];
        ReadoutConfig r = cfg.readout;
        if (request.axis == "drive_amp") {
            r.n_bar = cfg.readout.n_bar * v * v;
        } else {
            const double tau = v * 1e-6;
            if (tau != cfg.readout.tau_int) {
                r.pulse_len = tau + (cfg.readout.pulse_len - cfg.readout.tau_int);
                r.tau_int = tau;
            }
        }
        table.cell_int(static_cast<long long>(k)).cell(v).cell(r.n_bar).cell(r.tau_int * 1e6);
        try {
            r.validate();
            const SingleShotPoint p = single_shot_point(cfg, r, settings);
            files.push_back({"points/" + std::to_string(k) + "/fidelity_report.json",
                             dump_fixed(fidelity_report_json(cfg, p, settings))});
            const double f = p.report.assignment.fidelity;
            table.cell(f).cell(1.0 - f).cell(p.report.eps_snr).cell(p.report.eps_prep_mix)
                .cell(p.report.snr).cell(p.report.threshold.value).cell("ok");
            xs.push_back(v);
            err_total.push_back(1.0 - f);
            eps.push_back(p.report.eps_snr);
            taus.push_back(r.tau_int);
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& e) {
            ++warnings;
            err << "warning: sweep point " << k << " (" << request.axis << " = "
                << format_shortest(v) << ") failed: " << e.what() << "\n";
            const double nan = std::numeric_limits<double>::quiet_NaN();
            table.cell(nan).cell(nan).cell(nan).cell(nan).cell(nan).cell(nan).cell("failed");
        }
        table.end_row();
    }
    OrderedJson summary;
    summary["experiment"] = cfg.experiment_name;
    summary["config_hash"] = cfg.config_hash;
    summary["seed"] = cfg.seed;
    summary["axis"] = request.axis;
    summary["grid"] = request.grid;
    summary["points"] = request.grid.size();
    summary["warnings"] = warnings;
    if (request.axis == "tau_int" && taus.size() == request.grid.size()) {
        OrderedJson ttt = OrderedJson::array();
        for (double target : {0.005, 0.001}) {
            const auto tau = time_to_threshold(taus, eps, target);
            OrderedJson row;
            row["target_eps"] = target;
            row["tau_int_us"] = tau ? OrderedJson(*tau * 1e6) : OrderedJson(nullptr);
            ttt.push_back(row);
        }
        summary["time_to_threshold"] = ttt;
    }
    files.push_back({"sweep.csv", table.str()});
    files.push_back({"sweep_summary.json", dump_fixed(summary)});
    files.push_back({"config.json", loaded.text});
    if (request.svg && !xs.empty()) {
        files.push_back({"sweep.svg", svg_plot("Sweep over " + request.axis, request.axis, "error",
                                               {{"1 - F", xs, err_total, true},
                                                {"eps_snr", xs, eps, true}},
                                               true)});
    }
    const std::string grid_hash = sha256_hex(request.axis + ":" + grid_text(request.grid));
    const fs::path dir =
        run_directory(cfg) / "sweeps" / (request.axis + "-" + grid_hash.substr(0, 8));
    OrderedJson extra;
    extra["kind"] = "sweep";
    extra["axis"] = request.axis;
    extra["grid"] = request.grid;
    extra["warnings"] = warnings;
    emit(dir, cfg, std::move(files), extra, elapsed(start));
    return {dir, warnings};
}

void verify_manifest(const fs::path& manifest) {
    OrderedJson m;
    try {
        m = OrderedJson::parse(read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError("unreadable manifest " + manifest.string() + ": " + e.what());
    }
    if (!m.contains("files") || !m.contains("config_hash")) {
        throw IntegrityError("manifest " + manifest.string() + " lacks files or config_hash");
    }
    for (const auto& f : m.at("files")) {
        const fs::path path = manifest.parent_path() / f.at("path").get<std::string>();
        if (!fs::exists(path)) {
            throw IntegrityError("missing output " + path.string());
        }
        if (sha256_hex(read_file(path)) != f.at("sha256").get<std::string>()) {
            throw IntegrityError("checksum mismatch for " + path.string());
        }
    }
}

fs::path execute_report(const ReportRequest& request) {
    if (!fs::is_directory(request.directory)) {
        throw ValidationError("not a directory: " + request.directory.string());
    }
    std::vector<fs::path> manifests;
    for (const auto& entry : fs::recursive_directory_iterator(request.directory)) {
        if (entry.is_regular_file() && entry.path().filename() == "manifest.json") {
            manifests.push_back(entry.path());
        }
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) {
        throw IntegrityError("found 0 manifests under " + request.directory.string());
    }

    OrderedJson by_hash = OrderedJson::object();
    std::map<std::string, std::vector<std::string>> occurrences;
    struct Metric {
        std::string name;
        std::string reference;
        OrderedJson value;
        std::string source;
    };
    std::vector<Metric> metrics{{"JPA-off assignment fidelity", "0.962", nullptr, ""},
                                {"JPA-on assignment fidelity", "0.978", nullptr, ""},
                                {"QND fidelity F_Q", "0.996", nullptr, ""},
                                {"T_n,eff JPA off (K)", "12.9", nullptr, ""},
                                {"T_n,eff JPA on (K)", "0.6", nullptr, ""},
                                {"CKP peak photon number", "27 +- 1", nullptr, ""}};
    auto set_metric = [&](std::size_t k, const OrderedJson& v, const std::string& src) {
        if (metrics[k].value.is_null() && !v.is_null()) {
            metrics[k].value = v;
            metrics[k].source = src;
        }
    };

    for (const fs::path& mpath : manifests) {
        verify_manifest(mpath);
        const OrderedJson m = OrderedJson::parse(read_file(mpath));
        const fs::path dir = mpath.parent_path();
        const std::string rel = fs::relative(dir, request.directory).generic_string();
        const std::string hash = m.at("config_hash").get<std::string>();
        const std::string kind = m.value("kind", "run");
        std::string identity = hash + "|" + kind;
        if (kind == "sweep") {
            identity += "|" + m.value("axis", "") + "|" + m.at("grid").dump();
        }
        occurrences[identity].push_back(rel);

        OrderedJson e;
        e["path"] = rel;
        e["kind"] = kind;
        e["experiment"] = json_or_null(m, "experiment");
        e["seed"] = json_or_null(m, "seed");
        if (kind == "sweep") {
            e["axis"] = m.at("axis");
            e["grid"] = m.at("grid");
        }
        OrderedJson reports = OrderedJson::object();
        OrderedJson tables = OrderedJson::object();
        for (const auto& f : m.at("files")) {
            const std::string name = f.at("path").get<std::string>();
            const std::string text = read_file(dir / name);
            const std::string ext = fs::path(name).extension().string();
            const std::string base = fs::path(name).filename().string();
            if (ext == ".json" && base != "config.json" && name.find('/') == std::string::npos) {
                reports[name] = OrderedJson::parse(text);
            } else if (ext == ".csv" && !kUnmergedTables.count(base)) {
                tables[name] = csv_json(text);
            }
        }
        if (reports.contains("fidelity_report.json")) {
            const auto& r = reports["fidelity_report.json"];
            set_metric(r.value("amplifier", "") == "jpa_on" ? 1 : 0, json_or_null(r, "fidelity"),
                       rel);
        }
        if (reports.contains("qnd_report.json")) {
            set_metric(2, json_or_null(reports["qnd_report.json"], "f_q"), rel);
        }
        if (reports.contains("efficiency_fit.json")) {
            const auto& r = reports["efficiency_fit.json"];
            set_metric(r.value("amplifier", "") == "jpa_on" ? 4 : 3, json_or_null(r, "t_n_eff_k"),
                       rel);
        }
        if (reports.contains("ckp_report.json")) {
            set_metric(5, json_or_null(reports["ckp_report.json"], "n_bar_peak"), rel);
        }
        e["reports"] = reports;
        e["tables"] = tables;
        if (!by_hash.contains(hash)) {
            by_hash[hash] = OrderedJson::array();
        }
        by_hash[hash].push_back(e);
    }

    OrderedJson duplicates = OrderedJson::array();
    for (const auto& [identity, paths] : occurrences) {
        if (paths.size() > 1) {
            OrderedJson d;
            d["config_hash"] = identity.substr(0, identity.find('|'));
            d["paths"] = paths;
            duplicates.push_back(d);
        }
    }
    OrderedJson comparison = OrderedJson::array();
    for (const Metric& mt : metrics) {
        OrderedJson row;
        row["quantity"] = mt.name;
        row["reference"] = mt.reference;
        row["simulated"] = mt.value;
        row["source"] = mt.source.empty() ? OrderedJson(nullptr) : OrderedJson(mt.source);
        comparison.push_back(row);
    }
    OrderedJson summary;
    summary["artifact_version"] = kArtifactVersion;
    summary["manifests"] = manifests.size();
    summary["duplicates"] = duplicates;
    summary["reference_comparison"] = comparison;
    summary["runs"] = by_hash;

    std::ostringstream md;
    md << "# fluxshot summary\n\n";
    md << manifests.size() << " manifest(s) verified under `" << request.directory.generic_string()
       << "`.\n\n";
    md << "## Reference comparison\n\n| quantity | reference | simulated | source |\n|---|---|---|---|\n";
    for (const Metric& mt : metrics) {
        md << "| " << mt.name << " | " << mt.reference << " | " << md_value(mt.value) << " | "
           << (mt.source.empty() ? "n/a" : mt.source) << " |\n";
    }
    md << "\n## Runs\n\n| config hash | kind | experiment | path |\n|---|---|---|---|\n";
    for (auto it = by_hash.begin(); it != by_hash.end(); ++it) {
        for (const auto& e : it.value()) {
            md << "| " << it.key().substr(0, 16) << " | " << e.at("kind").get<std::string>()
               << " | " << md_value(e.at("experiment")) << " | " << e.at("path").get<std::string>()
               << " |\n";
        }
    }
    md << "\n## Duplicates\n\n";
    if (duplicates.empty()) {
        md << "none\n";
    }
    for (const auto& d : duplicates) {
        md << "- " << d.at("config_hash").get<std::string>().substr(0, 16) << ":";
        for (const auto& p : d.at("paths")) {
            md << " " << p.get<std::string>();
        }
        md << "\n";
    }

    const fs::path out = request.output.value_or(request.directory);
    fs::create_directories(out);
    write_file(out / "summary.json", dump_fixed(summary));
    write_file(out / "summary.md", md.str());
    return out;
}

ScenarioConfig execute_validate(const fs::path& config) { return load(config, std::nullopt).cfg; }

int guarded(const std::function<void()>& body, std::ostream& err) {
    try {
        body();
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: invalid input: " << e.what() << "\n";
    } catch (const IntegrityError& e) {
        err << "error: integrity: " << e.what() << "\n";
    } catch (const ParameterError& e) {
        err << "error: invalid parameter: " << e.what() << "\n";
    } catch (const LookupError& e) {
        err << "error: lookup: " << e.what() << "\n";
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed JSON: " << e.what() << "\n";
    } catch (const fs::filesystem_error& e) {
        err << "error: filesystem: " << e.what() << "\n";
    } catch (const Error& e) {
        err << "error: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInvalid;
}

}  // namespace fluxshot
