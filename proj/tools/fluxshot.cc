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

#include <iostream>

#include <CLI11.hpp>

#include "fluxshot/cli.h"
#include "fluxshot/output.h"

int main(int argc, char** argv) {
    using namespace fluxshot;
    CLI::App app{"fluxshot: dispersive single-shot readout simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kArtifactVersion);

    RunRequest run;
    std::string run_out;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config");
    run_cmd->add_option("config", run.config, "Scenario JSON")->required();
    run_cmd->add_option("-o,--output-dir", run_out, "Override output_dir from the config");
    run_cmd->add_flag("--svg", run.svg, "Also emit SVG plots");

    SweepRequest sweep;
    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep readout amplitude or integration time");
    sweep_cmd->add_option("config", sweep.config, "Scenario JSON")->required();
    sweep_cmd->add_option("--axis", sweep.axis, "drive_amp or tau_int")
        ->required()
        ->check(CLI::IsMember({"drive_amp", "tau_int"}));
    sweep_cmd->add_option("--grid", sweep.grid,
                          "Ascending grid: amplitude factors, or tau_int in microseconds")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("-o,--output-dir", sweep_out, "Override output_dir from the config");
    sweep_cmd->add_flag("--svg", sweep.svg, "Also emit SVG plots");

    ReportRequest report;
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "Verify and summarize finished runs");
    report_cmd->add_option("dir", report.directory, "Directory holding run outputs")->required();
    report_cmd->add_option("-o,--output", report_out, "Where to write summary.json and summary.md");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
    validate_cmd->add_option("config", validate_path, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    return guarded(
        [&] {
            if (*run_cmd) {
                if (!run_out.empty()) {
                    run.output_dir = run_out;
                }
                std::cout << execute_run(run).generic_string() << "\n";
            } else if (*sweep_cmd) {
                if (!sweep_out.empty()) {
                    sweep.output_dir = sweep_out;
                }
                const SweepOutcome out = execute_sweep(sweep, std::cerr);
                std::cout << out.directory.generic_string() << "\n";
                if (out.warnings > 0) {
                    std::cerr << out.warnings << " sweep point(s) failed\n";
                }
            } else if (*report_cmd) {
                if (!report_out.empty()) {
                    report.output = report_out;
                }
                std::cout << execute_report(report).generic_string() << "\n";
            } else if (*validate_cmd) {
                const ScenarioConfig cfg = execute_validate(validate_path);
                std::cout << "valid: " << cfg.experiment_name << " " << cfg.config_hash << "\n";
            }
        },
        std::cerr);
}
