// Copyright 2026 The qcpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcpd/harness.hpp"

using namespace qcpd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBadInput = 2;

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> growth_reference(const Scenario &sc, std::uint64_t seed) {
    if (sc.policy != Policy::escd) return std::nullopt;
    Rng rng(seed);
    GrowthOptions opt;
    opt.slack_fraction = sc.betting.slack;
    opt.bounds_mode = sc.bounds_mode;
    const auto obs = sc.observables();
    return estimate_growth_rate(make_theta_state(sc.d, sc.theta1), obs, sc.ensemble, rng, opt).d_star;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sequential quantum changepoint detection with classical shadows and e-detectors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string scenario_path, out_path, format = "csv", param, values, preset_name;
    long runs = 100;
    std::uint64_t seed = 1;
    unsigned parallelism = 1;
    bool with_growth = false;
    long shots = 100000;
    std::optional<long> preset_runs;

    auto *run = app.add_subcommand("run", "Run one scenario and write per-trial results");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--parallelism", parallelism, "Worker threads (0 = all cores)");
    run->add_option("--out", out_path, "Output path ('-' for stdout)");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--growth-reference", with_growth, "Attach D* of the post-change state to the summary");

    auto *sweep = app.add_subcommand("sweep", "Vary one scenario field and print one summary row per value");
    sweep->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--param", param, "Field name (theta0, theta1, nu, alpha, d, n, ...)")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--runs", runs, "Runs per value")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "Master seed");
    sweep->add_option("--parallelism", parallelism, "Worker threads (0 = all cores)");
    sweep->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

    auto *preset = app.add_subcommand("preset", "Run a named experiment grid");
    preset->add_option("--name", preset_name, "Preset name")->required();
    preset->add_option("--runs", preset_runs, "Override runs per point")->check(CLI::PositiveNumber);
    preset->add_option("--seed", seed, "Master seed");
    preset->add_option("--parallelism", parallelism, "Worker threads (0 = all cores)");
    preset->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

    auto *validate = app.add_subcommand("validate", "Run the enumeration-oracle invariant suite");
    validate->add_option("--seed", seed, "Seed for the random states");

    auto *growth = app.add_subcommand("growth", "Print the growth-rate estimate of the post-change state as JSON");
    growth->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    growth->add_option("--seed", seed, "Seed for Monte Carlo estimation");
    growth->add_option("--shots", shots, "Monte Carlo shots when enumeration is unavailable")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*run) {
            const Scenario sc = load_scenario(scenario_path);
            const auto t0 = std::chrono::steady_clock::now();
            const auto results = run_experiment(sc, runs, seed, parallelism);
            SummaryStats stats = summarize(results);
            if (with_growth) stats.d_star_reference = growth_reference(sc, seed);
            const RunMeta meta{seed, seconds_since(t0)};
            if (out_path.empty() || out_path == "-") {
                if (format == "csv") std::cout << trials_csv(sc, results);
                else std::cout << results_json(sc, results, stats, meta).dump(2) << "\n";
            } else {
                emit_results(sc, results, stats, format == "csv" ? OutputFormat::csv : OutputFormat::json, out_path,
                             meta);
            }
            std::cerr << summary_csv_header() << summary_csv_row("run", stats);
            return kExitOk;
        }
        if (*sweep) {
            const Scenario base = load_scenario(scenario_path);
            std::string text = summary_csv_header();
            for (const auto &v : split_list(values)) {
                Scenario sc = base;
                set_scenario_param(sc, param, v);
                const auto stats = summarize(run_experiment(sc, runs, seed, parallelism));
                text += summary_csv_row(param + "=" + v, stats);
            }
            write_text(out_path, text);
            return kExitOk;
        }
        if (*preset) {
            std::string text = summary_csv_header();
            for (const auto &pt : make_preset(preset_name)) {
                const auto stats = summarize(run_experiment(pt.scenario, preset_runs.value_or(pt.runs), seed, parallelism));
                text += summary_csv_row(pt.label, stats);
                std::cerr << pt.label << " done\n";
            }
            write_text(out_path, text);
            return kExitOk;
        }
        if (*validate) {
            bool all = true;
            for (const auto &c : run_validation_suite(seed)) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
                if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
                std::cout << "\n";
                all = all && c.passed;
            }
            return all ? kExitOk : kExitValidation;
        }
        if (*growth) {
            const Scenario sc = load_scenario(scenario_path);
            Rng rng(seed);
            GrowthOptions opt;
            opt.slack_fraction = sc.betting.slack;
            opt.bounds_mode = sc.bounds_mode;
            opt.shots = shots;
            const auto obs = sc.observables();
            const auto g = estimate_growth_rate(make_theta_state(sc.d, sc.theta1), obs, sc.ensemble, rng, opt);
            std::cout << growth_json(g).dump(2) << "\n";
            return kExitOk;
        }
    } catch (const ScenarioError &e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument &e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitOk;
}
