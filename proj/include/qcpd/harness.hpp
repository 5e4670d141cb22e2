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

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcpd/betting.hpp"
#include "qcpd/edetect.hpp"
#include "qcpd/matched.hpp"
#include "qcpd/qcore.hpp"
#include "qcpd/shadows.hpp"

namespace qcpd {

inline constexpr const char *kVersion = "0.1.0";

/// Invalid scenario; path() names the offending field, e.g. "betting.cbce.grid".
class ScenarioError : public std::invalid_argument {
  public:
    ScenarioError(std::string path, const std::string &message)
        : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
    const std::string &path() const { return path_; }

  private:
    std::string path_;
};

enum class Policy { escd, emcd_rr, emcd_ucb };
enum class BettingKind { cbce, constant };

struct BettingSpec {
    BettingKind kind = BettingKind::cbce;
    int grid = kDefaultGridSize;
    /// Fraction of the unslacked interval width removed from each end.
    double slack = kDefaultSlackFraction;
    double constant = 0.0;
};

struct Scenario {
    int d = 2;
    Ensemble ensemble = Ensemble::local;
    /// Rotated family size n (gamma_i = pi i / (2n), i = 0..n-1); ignored when
    /// explicit observables are given.
    int rotated = 1;
    std::vector<ComplexMatrix> explicit_observables;
    double theta0 = -0.5;
    double theta1 = 0.5;
    std::optional<long> nu;  ///< empty means no change
    double alpha = 0.01;
    DetectorKind detector = DetectorKind::sr;
    std::vector<double> weights;  ///< empty means uniform
    BettingSpec betting;
    Policy policy = Policy::escd;
    double ucb_delta = 0.1;
    long run_cap = 5000;
    BoundsMode bounds_mode = BoundsMode::analytic;

    std::size_t num_observables() const;
    std::vector<Observable> observables() const;
    DetectorConfig detector_config() const;
    /// Throws ScenarioError.
    void validate() const;
};

nlohmann::json scenario_to_json(const Scenario &s);
/// Strict parse: unknown keys and type errors raise ScenarioError with the
/// field path. The result is validated.
Scenario scenario_from_json(const nlohmann::json &j);
Scenario load_scenario(const std::string &path);

/// Sets one top-level field from text ("0.5", "sr", "inf", ...). `n` sets the
/// rotated family size. Throws ScenarioError.
void set_scenario_param(Scenario &s, const std::string &name, const std::string &value);

struct TrialResult {
    long run_index = 0;
    std::uint64_t seed = 0;
    long stop_time = 0;  ///< equals the cap when censored
    bool censored = false;
    std::optional<long> nu;
    std::optional<long> delay;
    bool false_alarm = false;

    bool operator==(const TrialResult &) const = default;
};

struct SummaryStats {
    std::size_t runs = 0;
    double mean_run_length = 0.0;
    double run_length_stderr = 0.0;
    std::size_t delay_count = 0;
    double mean_delay = 0.0;    ///< NaN without delay samples
    double delay_stderr = 0.0;  ///< NaN with fewer than two samples
    std::array<double, 5> delay_quantiles{};  ///< 10/25/50/75/90, NaN if empty
    double false_alarm_fraction = 0.0;
    double censored_fraction = 0.0;
    std::optional<double> d_star_reference;
};

/// Precomputed, read-only view of a scenario shared by trials.
class TrialEngine {
  public:
    explicit TrialEngine(const Scenario &scenario);
    ~TrialEngine();
    TrialEngine(const TrialEngine &) = delete;
    TrialEngine &operator=(const TrialEngine &) = delete;

    TrialResult run(std::uint64_t seed, long run_index = 0) const;
    const Scenario &scenario() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

TrialResult run_trial(const Scenario &scenario, std::uint64_t seed);

/// Run i uses derive_seed(master_seed, i); output order is by run index.
/// parallelism 0 means one worker per hardware thread.
std::vector<TrialResult> run_experiment(const Scenario &scenario, long runs, std::uint64_t master_seed,
                                        unsigned parallelism = 1);

/// Throws std::invalid_argument on empty input.
SummaryStats summarize(const std::vector<TrialResult> &results);

/// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double> &sorted, double q);

enum class OutputFormat { csv, json };

struct RunMeta {
    std::uint64_t master_seed = 0;
    double wall_time_seconds = 0.0;
};

std::string format_real(double v);
std::string trials_csv(const Scenario &scenario, const std::vector<TrialResult> &results);
nlohmann::json results_json(const Scenario &scenario, const std::vector<TrialResult> &results,
                            const SummaryStats &stats, const RunMeta &meta);
nlohmann::json summary_json(const SummaryStats &stats);
std::vector<TrialResult> trials_from_json(const nlohmann::json &j);

/// Writes CSV or JSON; throws std::runtime_error naming the path on I/O failure.
void emit_results(const Scenario &scenario, const std::vector<TrialResult> &results, const SummaryStats &stats,
                  OutputFormat format, const std::string &path, const RunMeta &meta);

std::string summary_csv_header();
std::string summary_csv_row(const std::string &label, const SummaryStats &stats);

struct PresetPoint {
    std::string label;
    Scenario scenario;
    long runs = 100;
};

std::vector<std::string> preset_names();
/// Throws std::invalid_argument for an unknown name.
std::vector<PresetPoint> make_preset(const std::string &name);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Enumeration-oracle invariants (inverse channel, depolarizing channel,
/// bound containment, covering intervals, recursion identities).
std::vector<ValidationCheck> run_validation_suite(std::uint64_t seed);

nlohmann::json growth_json(const GrowthEstimate &g);

}  // namespace qcpd
