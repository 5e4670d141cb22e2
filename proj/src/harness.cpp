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

#include "qcpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

namespace qcpd {

using nlohmann::json;

namespace {

constexpr int kTableQubits = 4;  // local settings tabulated up to 3^4 x 2^4

int pow3(int d) {
    int v = 1;
    for (int k = 0; k < d; ++k) v *= 3;
    return v;
}

}  // namespace

struct TrialEngine::Impl {
    Scenario sc;
    std::vector<Observable> obs;
    DensityMatrix rho[2];
    DetectorConfig cfg;
    std::vector<EstimatorBounds> bounds;
    std::vector<LambdaInterval> adaptive_iv;  // one-sided, for CBCE
    std::vector<LambdaInterval> full_iv;      // two-sided, for constant bets

    // Local shadows: probabilities and estimates per (setting, outcome).
    bool table = false;
    int n_settings = 0;
    std::size_t n_outcomes = 0;
    std::vector<double> table_prob[2];
    std::vector<double> table_est;  // [obs][setting][outcome]

    // Matched measurements.
    std::vector<std::vector<double>> pm_prob[2];
    std::vector<std::vector<double>> pm_values;

    explicit Impl(const Scenario &s)
        : sc(s), obs(s.observables()), rho{make_theta_state(s.d, s.theta0), make_theta_state(s.d, s.theta1)} {
        sc.validate();
        cfg = sc.detector_config();
        const std::size_t n = obs.size();
        for (std::size_t i = 0; i < n; ++i) {
            EstimatorBounds b;
            if (sc.policy == Policy::escd) {
                b = estimator_bounds(obs[i], sc.ensemble, sc.bounds_mode, sc.d);
            } else {
                b = {obs[i].lambda_min(), obs[i].lambda_max(), BoundsMode::exhaustive};
            }
            const std::string p = "observables[" + std::to_string(i) + "]";
            if (!(b.lower < 0.0 && b.upper > 0.0)) {
                throw ScenarioError(p, "estimator range must contain values of both signs");
            }
            bounds.push_back(b);
            const auto iv = lambda_interval(b, relative_slack(b, sc.betting.slack));
            full_iv.push_back(iv);
            adaptive_iv.push_back(iv.nonnegative());
            if (sc.betting.kind == BettingKind::constant && !iv.contains(sc.betting.constant)) {
                throw ScenarioError("betting.constant", "bet outside the admissible interval of " + p);
            }
        }
        n_outcomes = std::size_t{1} << sc.d;
        if (sc.policy == Policy::escd && sc.ensemble == Ensemble::local && sc.d <= kTableQubits) {
            table = true;
            const auto settings = enumerate_local(sc.d);
            n_settings = static_cast<int>(settings.size());
            for (int r = 0; r < 2; ++r) {
                for (const auto &st : settings) {
                    const auto p = outcome_probabilities(rho[r], st);
                    table_prob[r].insert(table_prob[r].end(), p.begin(), p.end());
                }
            }
            for (const auto &o : obs)
                for (const auto &st : settings)
                    for (Outcome x = 0; x < n_outcomes; ++x) table_est.push_back(estimate_observable(st, x, o));
        }
        if (sc.policy != Policy::escd) {
            for (const auto &o : obs) {
                ProjectiveMeasurement pm(o);
                pm_values.push_back(pm.outcome_values());
                for (int r = 0; r < 2; ++r) pm_prob[r].push_back(pm.probabilities(rho[r]));
            }
        }
    }

    static std::vector<MeasurementSetting> enumerate_local(int d) {
        if (d <= 3) return enumerate_settings(Ensemble::local, d);
        std::vector<MeasurementSetting> out;
        const int total = pow3(d);
        for (int code = 0; code < total; ++code) {
            std::vector<LocalBasis> bases(static_cast<std::size_t>(d));
            int rest = code;
            for (int k = d - 1; k >= 0; --k) {
                bases[static_cast<std::size_t>(k)] = static_cast<LocalBasis>(rest % 3);
                rest /= 3;
            }
            out.push_back(MeasurementSetting::local(std::move(bases)));
        }
        return out;
    }

    std::vector<Bettor> make_bettors() const {
        std::vector<Bettor> out;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (sc.betting.kind == BettingKind::cbce) {
                out.emplace_back(CbceBettor(adaptive_iv[i], bounds[i], sc.betting.grid));
            } else {
                out.emplace_back(ConstantBettor(full_iv[i], sc.betting.constant));
            }
        }
        return out;
    }

    // One shadow measurement; fills o_hat for every observable.
    void shadow_step(int regime, Rng &rng, std::vector<double> &o_hat) const {
        if (table) {
            std::size_t code = 0;
            for (int k = 0; k < sc.d; ++k) code = code * 3 + rng.below(3);
            const std::span<const double> probs(table_prob[regime].data() + code * n_outcomes, n_outcomes);
            const std::size_t x = sample_index(probs, rng);
            const std::size_t per_obs = static_cast<std::size_t>(n_settings) * n_outcomes;
            for (std::size_t i = 0; i < obs.size(); ++i) o_hat[i] = table_est[i * per_obs + code * n_outcomes + x];
            return;
        }
        const auto setting = sample_setting(sc.ensemble, sc.d, rng);
        const Outcome x = measure(rho[regime], setting, rng);
        for (std::size_t i = 0; i < obs.size(); ++i) o_hat[i] = estimate_observable(setting, x, obs[i]);
    }

    TrialResult run(std::uint64_t seed, long run_index) const {
        Rng rng(seed);
        EDetector det(cfg);
        auto bettors = make_bettors();
        const std::size_t n = obs.size();
        std::vector<double> o_hat(n), inc(n);
        std::optional<UCBStats> ucb;
        if (sc.policy == Policy::emcd_ucb) ucb.emplace(n, sc.ucb_delta);

        TrialResult r;
        r.run_index = run_index;
        r.seed = seed;
        r.nu = sc.nu;
        long t = 1;
        bool stopped = false;
        for (; t <= sc.run_cap; ++t) {
            const int regime = (sc.nu && t >= *sc.nu) ? 1 : 0;
            if (sc.policy == Policy::escd) {
                shadow_step(regime, rng, o_hat);
                for (std::size_t i = 0; i < n; ++i) {
                    const double lam = bettors[i].bet();
                    inc[i] = baseline_increment(lam, o_hat[i]);
                    bettors[i].observe(o_hat[i]);
                }
                stopped = det.step(inc).decision == Decision::stop;
            } else {
                const std::size_t i = sc.policy == Policy::emcd_rr
                                          ? select_index(SchedulePolicy::round_robin, t, n)
                                          : select_index(SchedulePolicy::ucb, t, n, &*ucb);
                const double value = pm_values[i][sample_index(pm_prob[regime][i], rng)];
                const double lam = bettors[i].bet();
                const double l = baseline_increment(lam, value);
                bettors[i].observe(value);
                if (ucb) ucb->record(i, l);
                stopped = det.step_selected(i, l).decision == Decision::stop;
            }
            if (stopped) break;
        }
        if (stopped) {
            r.stop_time = t;
            if (sc.nu) {
                if (t < *sc.nu) r.false_alarm = true;
                else r.delay = t - *sc.nu;
            }
        } else {
            r.stop_time = sc.run_cap;
            r.censored = true;
        }
        return r;
    }
};

TrialEngine::TrialEngine(const Scenario &scenario) : impl_(std::make_unique<Impl>(scenario)) {}
TrialEngine::~TrialEngine() = default;

TrialResult TrialEngine::run(std::uint64_t seed, long run_index) const { return impl_->run(seed, run_index); }
const Scenario &TrialEngine::scenario() const { return impl_->sc; }

TrialResult run_trial(const Scenario &scenario, std::uint64_t seed) { return TrialEngine(scenario).run(seed, 0); }

std::vector<TrialResult> run_experiment(const Scenario &scenario, long runs, std::uint64_t master_seed,
                                        unsigned parallelism) {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    const TrialEngine engine(scenario);
    std::vector<TrialResult> out(static_cast<std::size_t>(runs));
    if (parallelism == 0) parallelism = std::max(1U, std::thread::hardware_concurrency());
    parallelism = std::min<unsigned>(parallelism, static_cast<unsigned>(runs));

    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (long i = next++; i < runs && !failed; i = next++) {
            try {
                out[static_cast<std::size_t>(i)] = engine.run(derive_seed(master_seed, static_cast<std::uint64_t>(i)), i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < parallelism; ++k) pool.emplace_back(worker);
        for (auto &th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

// ---------------------------------------------------------------------------

double quantile_sorted(const std::vector<double> &sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

void mean_and_stderr(const std::vector<double> &v, double &mean, double &se) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (v.empty()) {
        mean = se = nan;
        return;
    }
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / static_cast<double>(v.size());
    if (v.size() < 2) {
        se = nan;
        return;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

SummaryStats summarize(const std::vector<TrialResult> &results) {
    if (results.empty()) throw std::invalid_argument("summarize: no results");
    SummaryStats s;
    s.runs = results.size();
    std::vector<double> lengths, delays;
    std::size_t false_alarms = 0, censored = 0;
    for (const auto &r : results) {
        lengths.push_back(static_cast<double>(r.stop_time));
        if (r.delay) delays.push_back(static_cast<double>(*r.delay));
        false_alarms += r.false_alarm ? 1 : 0;
        censored += r.censored ? 1 : 0;
    }
    mean_and_stderr(lengths, s.mean_run_length, s.run_length_stderr);
    if (results.size() == 1) s.run_length_stderr = 0.0;
    mean_and_stderr(delays, s.mean_delay, s.delay_stderr);
    s.delay_count = delays.size();
    std::sort(delays.begin(), delays.end());
    const double qs[5] = {0.10, 0.25, 0.50, 0.75, 0.90};
    for (int k = 0; k < 5; ++k) s.delay_quantiles[static_cast<std::size_t>(k)] = quantile_sorted(delays, qs[k]);
    s.false_alarm_fraction = static_cast<double>(false_alarms) / static_cast<double>(s.runs);
    s.censored_fraction = static_cast<double>(censored) / static_cast<double>(s.runs);
    return s;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

const char *policy_label(Policy p) {
    switch (p) {
        case Policy::escd: return "escd";
        case Policy::emcd_rr: return "emcd_rr";
        case Policy::emcd_ucb: return "emcd_ucb";
    }
    return "escd";
}

// Rounds to 12 significant digits so JSON output is platform-stable.
json stable_real(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_real(v).c_str(), nullptr);
}

json optional_long(const std::optional<long> &v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string trials_csv(const Scenario &sc, const std::vector<TrialResult> &results) {
    std::string out =
        "run_index,seed,policy,d,ensemble,n_observables,theta0,theta1,nu,alpha,detector,stop_time,censored,"
        "false_alarm,delay\n";
    const std::string fixed = std::string(policy_label(sc.policy)) + "," + std::to_string(sc.d) + "," +
                              (sc.ensemble == Ensemble::local ? "local" : "joint") + "," +
                              std::to_string(sc.num_observables()) + "," + format_real(sc.theta0) + "," +
                              format_real(sc.theta1) + "," + (sc.nu ? std::to_string(*sc.nu) : "inf") + "," +
                              format_real(sc.alpha) + "," + (sc.detector == DetectorKind::sr ? "sr" : "cusum");
    for (const auto &r : results) {
        out += std::to_string(r.run_index) + "," + std::to_string(r.seed) + "," + fixed + "," +
               std::to_string(r.stop_time) + "," + (r.censored ? "1" : "0") + "," + (r.false_alarm ? "1" : "0") +
               "," + (r.delay ? std::to_string(*r.delay) : "") + "\n";
    }
    return out;
}

json summary_json(const SummaryStats &s) {
    json q = json::array();
    for (double v : s.delay_quantiles) q.push_back(stable_real(v));
    json j = {{"runs", s.runs},
              {"mean_run_length", stable_real(s.mean_run_length)},
              {"run_length_stderr", stable_real(s.run_length_stderr)},
              {"delay_count", s.delay_count},
              {"mean_delay", stable_real(s.mean_delay)},
              {"delay_stderr", stable_real(s.delay_stderr)},
              {"delay_quantiles", {{"q10", q[0]}, {"q25", q[1]}, {"q50", q[2]}, {"q75", q[3]}, {"q90", q[4]}}},
              {"false_alarm_fraction", stable_real(s.false_alarm_fraction)},
              {"censored_fraction", stable_real(s.censored_fraction)},
              {"d_star_reference", s.d_star_reference ? stable_real(*s.d_star_reference) : json(nullptr)}};
    return j;
}

json results_json(const Scenario &sc, const std::vector<TrialResult> &results, const SummaryStats &stats,
                  const RunMeta &meta) {
    json trials = json::array();
    for (const auto &r : results) {
        trials.push_back({{"run_index", r.run_index},
                          {"seed", r.seed},
                          {"stop_time", r.stop_time},
                          {"censored", r.censored},
                          {"nu", optional_long(r.nu)},
                          {"delay", optional_long(r.delay)},
                          {"false_alarm", r.false_alarm}});
    }
    const auto cfg = sc.detector_config();
    json m = {{"version", kVersion},
              {"master_seed", meta.master_seed},
              {"wall_time_seconds", stable_real(meta.wall_time_seconds)},
              {"weights", cfg.weights},
              {"threshold", stable_real(cfg.threshold())},
              {"betting", scenario_to_json(sc)["betting"]},
              {"ucb_delta", sc.ucb_delta}};
    return {{"scenario", scenario_to_json(sc)}, {"trials", trials}, {"summary", summary_json(stats)}, {"meta", m}};
}

std::vector<TrialResult> trials_from_json(const json &j) {
    const json &arr = j.contains("trials") ? j.at("trials") : j;
    std::vector<TrialResult> out;
    for (const auto &t : arr) {
        TrialResult r;
        r.run_index = t.at("run_index").get<long>();
        r.seed = t.at("seed").get<std::uint64_t>();
        r.stop_time = t.at("stop_time").get<long>();
        r.censored = t.at("censored").get<bool>();
        if (!t.at("nu").is_null()) r.nu = t.at("nu").get<long>();
        if (!t.at("delay").is_null()) r.delay = t.at("delay").get<long>();
        r.false_alarm = t.at("false_alarm").get<bool>();
        out.push_back(r);
    }
    return out;
}

void emit_results(const Scenario &sc, const std::vector<TrialResult> &results, const SummaryStats &stats,
                  OutputFormat format, const std::string &path, const RunMeta &meta) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (format == OutputFormat::csv) out << trials_csv(sc, results);
    else out << results_json(sc, results, stats, meta).dump(2) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string summary_csv_header() {
    return "label,runs,mean_run_length,run_length_stderr,delay_count,mean_delay,delay_stderr,delay_q10,delay_q25,"
           "delay_q50,delay_q75,delay_q90,false_alarm_fraction,censored_fraction\n";
}

std::string summary_csv_row(const std::string &label, const SummaryStats &s) {
    std::string row = label + "," + std::to_string(s.runs) + "," + format_real(s.mean_run_length) + "," +
                      format_real(s.run_length_stderr) + "," + std::to_string(s.delay_count) + "," +
                      format_real(s.mean_delay) + "," + format_real(s.delay_stderr);
    for (double q : s.delay_quantiles) row += "," + format_real(q);
    row += "," + format_real(s.false_alarm_fraction) + "," + format_real(s.censored_fraction) + "\n";
    return row;
}

json growth_json(const GrowthEstimate &g) {
    json per = json::array();
    for (std::size_t i = 0; i < g.per_observable.size(); ++i) {
        per.push_back({{"index", i},
                       {"d_star", stable_real(g.per_observable[i])},
                       {"lambda", stable_real(g.per_observable_lambda[i])}});
    }
    return {{"d_star", stable_real(g.d_star)},
            {"i_star", g.i_star},
            {"lambda_star", stable_real(g.lambda_star)},
            {"exact", g.exact},
            {"per_observable", per}};
}

}  // namespace qcpd
