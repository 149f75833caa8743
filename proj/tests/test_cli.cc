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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "fluxshot/batch_io.h"
#include "fluxshot/cli.h"
#include "fluxshot/errors.h"
#include "fluxshot/scenario.h"

using namespace fluxshot;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = FLUXSHOT_CONFIG_DIR;

json config(const std::string& name) {
    std::ifstream in(kConfigs / name);
    return json::parse(in);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fluxshot_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "cfg.json") {
    std::ofstream out(dir / name);
    out << doc.dump(2);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_code_of(const std::function<void()>& body) {
    std::ostringstream err;
    return guarded(body, err);
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(FLUXSHOT_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Scenario, ShippedConfigsParse) {
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        if (entry.path().filename().string().rfind("invalid", 0) == 0) {
            EXPECT_THROW(load_scenario(entry.path()), ValidationError) << entry.path();
        } else {
            EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
        }
    }
}

TEST(Scenario, UnknownKeysAreRejected) {
    for (const auto& path : std::vector<std::vector<std::string>>{
             {"extra"}, {"device", "extra"}, {"device", "cavity", "extra"},
             {"readout", "extra"}, {"experiment", "extra"}, {"noise", "jpa_on", "extra"}}) {
        json doc = config("single_shot_jpa_off.json");
        json* node = &doc;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            node = &(*node)[path[k]];
        }
        (*node)[path.back()] = 1;
        EXPECT_THROW(parse_scenario(doc), ValidationError) << path.back();
    }
}

TEST(Scenario, DomainChecks) {
    json doc = config("single_shot_jpa_off.json");
    doc["version"] = 2;
    EXPECT_THROW(parse_scenario(doc), ValidationError);
    doc = config("single_shot_jpa_off.json");
    doc["device"]["cavity"]["chi_mhz"].erase("h");
    EXPECT_THROW(parse_scenario(doc), ValidationError);
    doc = config("single_shot_jpa_off.json");
    doc["experiment"]["prep_error"] = 1.5;
    EXPECT_THROW(parse_scenario(doc), ValidationError);
    doc = config("single_shot_jpa_off.json");
    doc["experiment"]["type"] = "tomography";
    EXPECT_THROW(parse_scenario(doc), ValidationError);
    doc = config("single_shot_jpa_off.json");
    doc["readout"]["tau_int_us"] = "long";
    EXPECT_THROW(parse_scenario(doc), ValidationError);
    doc = config("single_shot_jpa_off.json");
    doc["n_shots"] = 100;
    EXPECT_THROW(parse_scenario(doc), ValidationError);
}

TEST(Scenario, HashIgnoresOutputDirectoryOnly) {
    json a = config("qnd.json");
    json b = a;
    b["output_dir"] = "elsewhere";
    json c = a;
    c["seed"] = 14;
    EXPECT_EQ(parse_scenario(a).config_hash, parse_scenario(b).config_hash);
    EXPECT_NE(parse_scenario(a).config_hash, parse_scenario(c).config_hash);
    EXPECT_EQ(parse_scenario(a).config_hash.size(), 64u);
}

TEST(Scenario, RateModelAssembly) {
    const ScenarioConfig cfg = load_scenario(kConfigs / "single_shot_jpa_off.json");
    const RateModel m = cfg.rate_model();
    EXPECT_EQ(m.num_levels(), 4u);
    EXPECT_NEAR(m.base_rate(Level::h, Level::e), 1500.0, 1e-12);
    EXPECT_NEAR(m.base_rate(Level::e, Level::g) + m.base_rate(Level::g, Level::e), 1.0 / 402e-6,
                1e-6);
    EXPECT_EQ(m.mist_terms().size(), 4u);
    EXPECT_DOUBLE_EQ(cfg.qubit_freq_ghz(), 0.32812);
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Run, WritesOutputsAndVerifiableManifest) {
    const fs::path dir = scratch("run");
    json doc = config("single_shot_jpa_off.json");
    doc["n_shots"] = 2000;
    const fs::path cfg = write_config(dir, doc);
    RunRequest req{cfg, dir / "out", false};
    const fs::path run = execute_run(req);
    EXPECT_EQ(run.parent_path().filename(), "single_shot");
    for (const char* f : {"fidelity_report.json", "histogram.csv", "shots.csv", "shots.json",
                          "config.json", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(run / f)) << f;
    }
    EXPECT_FALSE(fs::exists(run / "histogram.svg"));
    EXPECT_EQ(slurp(run / "config.json"), slurp(cfg));
    EXPECT_NO_THROW(verify_manifest(run / "manifest.json"));
    const json m = json::parse(slurp(run / "manifest.json"));
    EXPECT_EQ(m["artifact_version"], "1.0.0");
    EXPECT_EQ(m["seed"], 7);
    const ShotBatch b = read_batch(run / "shots");
    EXPECT_EQ(b.size(), 4000u);

    const std::string first = slurp(run / "fidelity_report.json");
    execute_run(req);
    EXPECT_EQ(slurp(run / "fidelity_report.json"), first);

    std::ofstream(run / "histogram.csv", std::ios::app) << "tampered\n";
    EXPECT_THROW(verify_manifest(run / "manifest.json"), IntegrityError);
}

TEST(Run, ResetScenarioAnchors) {
    const fs::path dir = scratch("reset");
    RunRequest req{kConfigs / "reset.json", dir, false};
    const json r = json::parse(slurp(execute_run(req) / "reset_report.json"));
    EXPECT_NEAR(r["initial_p_e"].get<double>(), 0.35, 0.01);
    EXPECT_NEAR(r["residual_p_e"].get<double>(), 0.03, 0.005);
}

TEST(Sweep, SinglePointEqualsRun) {
    const fs::path dir = scratch("sweep_one");
    json doc = config("single_shot_jpa_on.json");
    doc["n_shots"] = 2000;
    const fs::path cfg = write_config(dir, doc);
    const fs::path run = execute_run({cfg, dir / "out", false});
    std::ostringstream err;
    const SweepOutcome amp = execute_sweep({cfg, "drive_amp", {1.0}, dir / "out", false}, err);
    const SweepOutcome tau = execute_sweep({cfg, "tau_int", {0.26}, dir / "out", false}, err);
    const std::string want = slurp(run / "fidelity_report.json");
    EXPECT_EQ(slurp(amp.directory / "points/0/fidelity_report.json"), want);
    EXPECT_EQ(slurp(tau.directory / "points/0/fidelity_report.json"), want);
    EXPECT_EQ(amp.warnings, 0u);
    EXPECT_NO_THROW(verify_manifest(amp.directory / "manifest.json"));
}

TEST(Sweep, IntegrationTimeWithoutTransitionsIsMonotone) {
    const fs::path dir = scratch("sweep_tau");
    json doc = config("single_shot_jpa_off.json");
    doc["rates"].erase("mist");
    doc["n_shots"] = 5000;
    doc["experiment"]["prep_error"] = 0.0;
    const fs::path cfg = write_config(dir, doc);
    std::ostringstream err;
    const SweepOutcome out =
        execute_sweep({cfg, "tau_int", {0.5, 1.0, 1.5, 2.0, 3.0}, dir / "out", false}, err);
    std::istringstream csv(slurp(out.directory / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    std::vector<double> eps;
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) {
            cells.push_back(c);
        }
        eps.push_back(parse_double(cells[6]));
    }
    ASSERT_EQ(eps.size(), 5u);
    for (std::size_t k = 1; k < eps.size(); ++k) {
        EXPECT_LT(eps[k], eps[k - 1]);
    }
}

TEST(Sweep, FailedPointsBecomeNanRows) {
    const fs::path dir = scratch("sweep_nan");
    json doc = config("single_shot_jpa_off.json");
    doc["n_shots"] = 1000;
    const fs::path cfg = write_config(dir, doc);
    std::ostringstream err;
    const SweepOutcome out = execute_sweep({cfg, "drive_amp", {1.0, 1e200}, dir / "out", false}, err);
    EXPECT_EQ(out.warnings, 1u);
    const std::string csv = slurp(out.directory / "sweep.csv");
    EXPECT_NE(csv.find("nan,nan"), std::string::npos);
    EXPECT_NE(csv.find("failed"), std::string::npos);
    EXPECT_NE(err.str().find("warning"), std::string::npos);
}

TEST(Sweep, RejectsBadGrids) {
    const fs::path cfg = kConfigs / "single_shot_jpa_off.json";
    std::ostringstream err;
    const fs::path out = scratch("sweep_bad");
    EXPECT_THROW(execute_sweep({cfg, "tau_int", {}, out, false}, err), ValidationError);
    EXPECT_THROW(execute_sweep({cfg, "tau_int", {2.0, 1.0}, out, false}, err), ValidationError);
    EXPECT_THROW(execute_sweep({cfg, "power", {1.0}, out, false}, err), ValidationError);
    EXPECT_THROW(execute_sweep({kConfigs / "ckp.json", "tau_int", {1.0}, out, false}, err),
                 ValidationError);
    EXPECT_TRUE(fs::is_empty(out));
}

TEST(Report, EmptyDirectoryIsAnIntegrityError) {
    EXPECT_THROW(execute_report({scratch("report_empty"), std::nullopt}), IntegrityError);
}

TEST(Report, DuplicatesAndReferenceTable) {
    const fs::path dir = scratch("report_dup");
    RunRequest a{kConfigs / "ckp.json", dir / "a", false};
    RunRequest b{kConfigs / "ckp.json", dir / "b", false};
    execute_run(a);
    execute_run(b);
    const fs::path out = execute_report({dir, std::nullopt});
    const json s = json::parse(slurp(out / "summary.json"));
    EXPECT_EQ(s["manifests"], 2);
    ASSERT_EQ(s["duplicates"].size(), 1u);
    EXPECT_EQ(s["duplicates"][0]["paths"].size(), 2u);
    bool found = false;
    for (const auto& row : s["reference_comparison"]) {
        if (row["reference"] == "27 +- 1") {
            found = true;
            EXPECT_NEAR(row["simulated"].get<double>(), 27.0, 1.0);
        }
    }
    EXPECT_TRUE(found);
    const std::string md = slurp(out / "summary.md");
    EXPECT_NE(md.find("0.996"), std::string::npos);
    EXPECT_NE(md.find("12.9"), std::string::npos);
}

TEST(ExitCodes, ExceptionMapping) {
    EXPECT_EQ(exit_code_of([] {}), 0);
    EXPECT_EQ(exit_code_of([] { throw ValidationError("x"); }), 2);
    EXPECT_EQ(exit_code_of([] { throw IntegrityError("x"); }), 2);
    EXPECT_EQ(exit_code_of([] { throw ParameterError("x"); }), 2);
    EXPECT_EQ(exit_code_of([] { throw FitError("x"); }), 3);
    EXPECT_EQ(exit_code_of([] { throw ConvergenceError("x"); }), 3);
    EXPECT_EQ(exit_code_of([] { throw DegenerateInputError("x"); }), 3);
}

TEST(ExitCodes, BinaryReportsValidationAndNumericalFailures) {
    const fs::path dir = scratch("binary");
    EXPECT_EQ(run_binary("validate " + (kConfigs / "qnd.json").string()), 0);
    EXPECT_EQ(run_binary("run " + (kConfigs / "invalid_negative_kappa.json").string() + " -o " +
                         (dir / "inv").string()),
              2);
    EXPECT_FALSE(fs::exists(dir / "inv"));
    json doc = config("ckp.json");
    doc["device"]["cavity"]["chi_mhz"]["e"] = -0.6;
    const fs::path flat = write_config(dir, doc, "flat.json");
    EXPECT_EQ(run_binary("run " + flat.string() + " -o " + (dir / "flat").string()), 3);
    EXPECT_EQ(run_binary("run " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_binary("sweep " + (kConfigs / "qnd.json").string() + " --axis power --grid 1"),
              2);
    EXPECT_EQ(run_binary("report " + (dir / "nothing").string()), 2);
}
