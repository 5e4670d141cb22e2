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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcpd/harness.hpp"

using namespace qcpd;
using nlohmann::json;

namespace {

Scenario neutral() {
    Scenario s;
    s.d = 1;
    s.alpha = 0.5;
    s.nu.reset();
    s.run_cap = 100;
    s.betting.kind = BettingKind::constant;
    s.betting.constant = 0.0;
    return s;
}

TrialResult make(long t, std::optional<long> nu, bool censored = false) {
    TrialResult r;
    r.stop_time = t;
    r.nu = nu;
    r.censored = censored;
    if (!censored && nu) {
        if (t < *nu) r.false_alarm = true;
        else r.delay = t - *nu;
    }
    return r;
}

std::string read_file(const std::string &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("qcpd_test_" + name)).string();
}

}  // namespace

TEST_CASE("scenario json round trip") {
    Scenario s;
    s.d = 2;
    s.ensemble = Ensemble::joint;
    s.rotated = 3;
    s.nu = 40;
    s.policy = Policy::emcd_ucb;
    s.ucb_delta = 0.2;
    s.weights = {0.2, 0.3, 0.5};
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
    CHECK(back.nu == 40);
    CHECK(back.num_observables() == 3);

    Scenario e;
    e.d = 1;
    e.explicit_observables = {gates::X(), gates::Y()};
    const Scenario eb = scenario_from_json(scenario_to_json(e));
    CHECK(eb.explicit_observables.size() == 2);
    CHECK(eb.explicit_observables[1].max_abs_diff(gates::Y()) == 0.0);

    const auto inf = scenario_from_json(json::parse(R"({"d": 1, "nu": "inf"})"));
    CHECK_FALSE(inf.nu.has_value());
}

TEST_CASE("scenario errors carry field paths") {
    auto path_of = [](const std::string &text) -> std::string {
        try {
            scenario_from_json(json::parse(text));
        } catch (const ScenarioError &e) {
            return e.path();
        }
        return "";
    };
    CHECK(path_of(R"({"d": 1, "bogus": 3})") == "bogus");
    CHECK(path_of(R"({"betting": {"cbce": {"grid": 64, "extra": 1}}})") == "betting.cbce.extra");
    CHECK(path_of(R"({"betting": {"cbce": {"grid": 0}}})") == "betting.cbce.grid");
    CHECK(path_of(R"({"nu": 10, "theta1": 0.0})") == "theta1");
    CHECK(path_of(R"({"nu": 10, "theta1": -0.2})") == "theta1");
    CHECK(path_of(R"({"nu": 10, "theta0": 0.3})") == "theta0");
    CHECK(path_of(R"({"alpha": 0.001, "run_cap": 10})") == "run_cap");
    CHECK(path_of(R"({"alpha": 1.5})") == "alpha");
    CHECK(path_of(R"({"d": 1, "weights": [0.5, 0.5]})") == "weights");
    CHECK(path_of(R"({"d": "two"})") == "d");
    CHECK(path_of(R"({"d": 2, "observables": {"explicit": [[[1, 0], [0, 1]]]}})") == "observables.explicit[0]");
    CHECK(path_of(R"({"d": 4, "bounds_mode": "exhaustive"})") == "bounds_mode");
    CHECK(path_of(R"({"policy": {"emcd_ucb": {"delta": 2}}})") == "policy.emcd_ucb.delta");
    CHECK(path_of(R"({"ensemble": "joint", "d": 7})") == "d");
    CHECK(path_of(R"({"d": 1, "theta1": 0.5})") == "");
}

TEST_CASE("sweep parameter setter") {
    Scenario s;
    set_scenario_param(s, "theta1", "0.75");
    CHECK(s.theta1 == 0.75);
    set_scenario_param(s, "n", "4");
    CHECK(s.num_observables() == 4);
    set_scenario_param(s, "policy", "emcd_rr");
    CHECK(s.policy == Policy::emcd_rr);
    set_scenario_param(s, "nu", "inf");
    CHECK_FALSE(s.nu.has_value());
    CHECK_THROWS_AS(set_scenario_param(s, "nonsense", "1"), ScenarioError);
    CHECK_THROWS_AS(set_scenario_param(s, "alpha", "2"), ScenarioError);
}

TEST_CASE("neutral bets stop at t = 2") {
    const Scenario s = neutral();
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto r = run_trial(s, seed);
        CHECK(r.stop_time == 2);
        CHECK_FALSE(r.censored);
        CHECK_FALSE(r.nu.has_value());
        CHECK_FALSE(r.delay.has_value());
    }
    Scenario cu = neutral();
    cu.detector = DetectorKind::cusum;
    const auto r = run_trial(cu, 5);
    CHECK(r.censored);
    CHECK(r.stop_time == cu.run_cap);
}

TEST_CASE("trial determinism and plausibility") {
    Scenario s;
    s.d = 1;
    s.theta0 = -0.5;
    s.theta1 = 1.0;
    s.nu = 50;
    s.alpha = 0.02;
    s.run_cap = 5000;
    CHECK(run_trial(s, 77) == run_trial(s, 77));
    const auto results = run_experiment(s, 100, 11);
    long late = 0;
    for (const auto &r : results) {
        if (r.stop_time >= 50) {
            ++late;
            REQUIRE(r.delay.has_value());
            CHECK(*r.delay == r.stop_time - 50);
        }
    }
    CHECK(late >= 90);
}

TEST_CASE("experiment seeding and parallelism") {
    Scenario s;
    s.d = 2;
    s.rotated = 2;
    s.nu = 30;
    s.alpha = 0.05;
    s.run_cap = 3000;
    const auto one = run_experiment(s, 40, 123, 1);
    const auto many = run_experiment(s, 40, 123, 8);
    CHECK(one == many);
    CHECK(trials_csv(s, one) == trials_csv(s, many));
    const auto single = run_experiment(s, 1, 123, 1);
    CHECK(single[0] == run_trial(s, derive_seed(123, 0)));
    const auto other = run_experiment(s, 40, 124, 1);
    std::vector<long> a, b;
    for (const auto &r : one) a.push_back(r.stop_time);
    for (const auto &r : other) b.push_back(r.stop_time);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a != b);
    CHECK_THROWS_AS(run_experiment(s, 0, 1), std::invalid_argument);
}

TEST_CASE("matched policies run") {
    Scenario s;
    s.d = 2;
    s.rotated = 3;
    s.nu = 20;
    s.alpha = 0.05;
    s.run_cap = 5000;
    for (Policy p : {Policy::emcd_rr, Policy::emcd_ucb}) {
        s.policy = p;
        const auto st = summarize(run_experiment(s, 30, 3));
        CHECK(st.censored_fraction == 0.0);
        CHECK(st.mean_run_length > 0.0);
    }
    s.policy = Policy::escd;
    s.ensemble = Ensemble::joint;
    CHECK(summarize(run_experiment(s, 10, 3)).censored_fraction == 0.0);
}

TEST_CASE("summaries") {
    const auto s = summarize({make(55, 50), make(60, 50), make(48, 50)});
    CHECK(s.delay_count == 2);
    CHECK(s.mean_delay == doctest::Approx(7.5));
    CHECK(s.false_alarm_fraction == doctest::Approx(1.0 / 3));
    CHECK(s.mean_run_length == doctest::Approx((55 + 60 + 48) / 3.0));

    const auto c = summarize({make(500, std::nullopt, true), make(500, std::nullopt, true)});
    CHECK(c.mean_run_length == 500.0);
    CHECK(c.censored_fraction == 1.0);
    CHECK(c.false_alarm_fraction == 0.0);
    CHECK(std::isnan(c.mean_delay));

    const auto one = summarize({make(7, 1)});
    CHECK(one.mean_delay == 6.0);
    CHECK(one.delay_quantiles[2] == 6.0);

    std::vector<TrialResult> many;
    for (long t = 1; t <= 11; ++t) many.push_back(make(10 + t, 10));
    const auto q = summarize(many).delay_quantiles;
    CHECK(q[0] == doctest::Approx(2.0));
    CHECK(q[2] == doctest::Approx(6.0));
    CHECK(q[4] == doctest::Approx(10.0));
    for (std::size_t k = 1; k < 5; ++k) CHECK(q[k - 1] <= q[k]);
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("emission") {
    Scenario s;
    s.d = 1;
    s.nu = 10;
    s.alpha = 0.1;
    s.run_cap = 1000;
    const auto results = run_experiment(s, 2, 5);
    const auto stats = summarize(results);

    const std::string csv_path = temp_path("out.csv");
    emit_results(s, results, stats, OutputFormat::csv, csv_path, {5, 0.25});
    const std::string csv = read_file(csv_path);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header ==
          "run_index,seed,policy,d,ensemble,n_observables,theta0,theta1,nu,alpha,detector,stop_time,censored,"
          "false_alarm,delay");
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 14);
    }
    CHECK(rows == 2);
    CHECK(csv.find('\r') == std::string::npos);

    const std::string json_path = temp_path("out.json");
    emit_results(s, results, stats, OutputFormat::json, json_path, {5, 0.25});
    const json j = json::parse(read_file(json_path));
    CHECK(j.contains("scenario"));
    CHECK(j.contains("trials"));
    CHECK(j.contains("summary"));
    CHECK(j["meta"]["master_seed"] == 5);
    CHECK(j["meta"]["version"] == kVersion);
    CHECK(trials_from_json(j) == results);
    CHECK(scenario_to_json(scenario_from_json(j["scenario"])) == scenario_to_json(s));
    std::filesystem::remove(csv_path);
    std::filesystem::remove(json_path);

    CHECK_THROWS_AS(emit_results(s, results, stats, OutputFormat::csv, "/nonexistent-dir/x.csv", {}),
                    std::runtime_error);
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("presets") {
    for (const auto &name : preset_names()) {
        const auto pts = make_preset(name);
        CHECK_FALSE(pts.empty());
        for (const auto &p : pts) CHECK_NOTHROW(p.scenario.validate());
    }
    const auto left = make_preset("fig3-left");
    CHECK(left.front().scenario.alpha == 1e-3);
    CHECK(left.front().scenario.run_cap == 5000);
    CHECK(left.front().runs == 100);
    const auto desk = make_preset("desk-fig3-left");
    CHECK(desk.front().scenario.alpha == 1e-2);
    CHECK(desk.front().scenario.run_cap == 2000);
    CHECK_THROWS_AS(make_preset("nope"), std::invalid_argument);
}

TEST_CASE("validation suite passes") {
    for (const auto &c : run_validation_suite(1)) CHECK_MESSAGE(c.passed, c.name);
}
