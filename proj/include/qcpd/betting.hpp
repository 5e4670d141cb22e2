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

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qcpd/qcore.hpp"
#include "qcpd/rng.hpp"
#include "qcpd/shadows.hpp"

namespace qcpd {

/// Closed betting interval [lo, hi] carved out of (-1/u, -1/l).
struct LambdaInterval {
    double lo = 0.0;
    double hi = 0.0;
    double slack = 0.0;

    double width() const { return hi - lo; }
    bool contains(double lambda) const { return lambda >= lo && lambda <= hi; }

    /// [max(lo, 0), hi]. One-sided bets keep E[1 + lambda o_hat] <= 1 whenever
    /// the mean of o_hat is nonpositive.
    LambdaInterval nonnegative() const;
};

/// (-1/u + slack, -1/l - slack). Throws std::invalid_argument unless
/// l < 0 < u, slack >= 0 and the result is nonempty.
LambdaInterval lambda_interval(const EstimatorBounds &bounds, double slack);

/// slack_fraction * (1/u - 1/l), i.e. a fraction of the unslacked width.
double relative_slack(const EstimatorBounds &bounds, double slack_fraction);

inline constexpr int kDefaultGridSize = 64;
inline constexpr double kDefaultSlackFraction = 0.005;

/// Closed time interval [first, last] of the geometric cover.
struct TimeInterval {
    long first = 0;
    long last = 0;
    bool operator==(const TimeInterval &) const = default;
};

/// A(t): the intervals [i 2^k, (i + 1) 2^k - 1], i >= 1, that contain t,
/// ordered by increasing k. Throws std::invalid_argument for t < 1.
std::vector<TimeInterval> covering_intervals(long t);

/// Quadrature grid shared by universal-portfolio experts on one interval.
///
/// Nodes are the K Gauss-Chebyshev points cos((2k-1)pi/(2K)) mapped affinely
/// into the interval, which is the Beta(1/2,1/2) prior rescaled; under that
/// prior every node carries weight 1/K.
struct BettingGrid {
    LambdaInterval interval;
    double lower = 0.0;  ///< estimator range l
    double upper = 0.0;  ///< estimator range u
    std::vector<double> lambdas;  ///< ascending
    std::vector<double> prior;    ///< sums to 1

    static std::shared_ptr<const BettingGrid> make(const LambdaInterval &interval, const EstimatorBounds &bounds,
                                                   int size = kDefaultGridSize);

    /// log(1 + lambda_k o_hat) for every node. Throws std::invalid_argument
    /// for an estimate outside [l, u].
    void log_increments(double o_hat, std::vector<double> &out) const;
};

/// Universal-portfolio expert started at `start_time`.
class UPExpert {
  public:
    UPExpert(std::shared_ptr<const BettingGrid> grid, long start_time);

    long start_time() const { return start_; }
    std::span<const double> log_wealth() const { return log_wealth_; }
    const BettingGrid &grid() const { return *grid_; }

    /// Wealth-weighted average of the grid, with max-subtraction.
    double bet() const;
    /// Absorbs one estimate.
    void update(double o_hat);
    /// Absorbs precomputed log(1 + lambda_k o_hat).
    void update_logs(std::span<const double> logs);

  private:
    std::shared_ptr<const BettingGrid> grid_;
    long start_;
    std::vector<double> log_wealth_;
    mutable std::optional<double> cached_bet_;
};

/// Coin-betting meta-aggregation of UP experts over geometric covering
/// intervals.
class CbceBettor {
  public:
    CbceBettor(const LambdaInterval &interval, const EstimatorBounds &bounds, int grid_size = kDefaultGridSize);

    /// Online step: feed the previous estimate (absent at t = 1) and get
    /// the bet for the next time step. Throws std::logic_error on misuse.
    double step(std::optional<double> previous);

    /// Bet for time() + 1. Repeated calls return the same value.
    double bet();
    /// Absorbs the estimate observed at the time of the last bet().
    void observe(double o_hat);

    long time() const { return time_; }
    const LambdaInterval &interval() const { return grid_->interval; }
    double loss_scale() const { return loss_scale_; }

    struct ActiveExpert {
        TimeInterval span;
        UPExpert expert;
        double prior = 0.0;  ///< unnormalized
        double sum_g = 0.0;
        double wealth = 1.0;
        long rounds = 0;
        double bet = 0.0;     ///< expert's lambda for the current step
        double weight = 0.0;  ///< raw coin bet w = beta * wealth
    };
    const std::vector<ActiveExpert> &experts() const { return active_; }
    /// Meta-weights p over experts() for the current step.
    const std::vector<double> &meta_weights() const { return p_; }

  private:
    void advance();

    std::shared_ptr<const BettingGrid> grid_;
    double loss_scale_ = 1.0;
    long time_ = 0;
    bool pending_ = false;  // bet issued, awaiting observe
    double meta_bet_ = 0.0;
    std::vector<ActiveExpert> active_;
    std::vector<double> p_;
    std::vector<double> logs_;
};

class ConstantBettor {
  public:
    ConstantBettor(const LambdaInterval &interval, double lambda);
    double bet() const { return lambda_; }
    void observe(double) {}

  private:
    double lambda_;
};

/// Either policy behind one interface.
class Bettor {
  public:
    explicit Bettor(ConstantBettor b) : impl_(b) {}
    explicit Bettor(CbceBettor b) : impl_(std::move(b)) {}

    double bet();
    void observe(double o_hat);

  private:
    std::variant<ConstantBettor, CbceBettor> impl_;
};

struct GrowthEstimate {
    double d_star = 0.0;
    std::size_t i_star = 0;  ///< 0-based
    double lambda_star = 0.0;
    std::vector<double> per_observable;
    std::vector<double> per_observable_lambda;
    bool exact = false;
};

struct GrowthOptions {
    int grid_points = 201;
    long shots = 100000;
    double slack_fraction = kDefaultSlackFraction;
    BoundsMode bounds_mode = BoundsMode::analytic;
};

/// D*_i = max over a grid on the slack-restricted (-1/u, -1/l) of
/// E log(1 + lambda o_hat_i) under rho1. Exact for enumerable ensembles (local
/// d <= 3, joint d = 1), Monte Carlo otherwise. lambda = 0 is always on the
/// grid, so every D*_i >= 0.
GrowthEstimate estimate_growth_rate(const DensityMatrix &rho1, std::span<const Observable> observables, Ensemble kind,
                                    Rng &rng, const GrowthOptions &options = {});

}  // namespace qcpd
