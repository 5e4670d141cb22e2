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

#include "qcpd/betting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace qcpd {

LambdaInterval LambdaInterval::nonnegative() const {
    if (hi <= 0.0) throw std::invalid_argument("interval has no positive part");
    return {std::max(lo, 0.0), hi, slack};
}

LambdaInterval lambda_interval(const EstimatorBounds &b, double slack) {
    if (!(b.lower < 0.0)) throw std::invalid_argument("estimator lower bound must be negative");
    if (!(b.upper > 0.0)) throw std::invalid_argument("estimator upper bound must be positive");
    if (!(slack >= 0.0) || !std::isfinite(slack)) throw std::invalid_argument("slack must be nonnegative");
    LambdaInterval out{-1.0 / b.upper + slack, -1.0 / b.lower - slack, slack};
    if (!(out.lo < out.hi)) throw std::invalid_argument("slack " + std::to_string(slack) + " empties the interval");
    return out;
}

double relative_slack(const EstimatorBounds &b, double slack_fraction) {
    if (!(b.lower < 0.0 && b.upper > 0.0)) throw std::invalid_argument("estimator range must straddle 0");
    if (!(slack_fraction >= 0.0 && slack_fraction < 0.5)) {
        throw std::invalid_argument("slack fraction must lie in [0, 0.5)");
    }
    return slack_fraction * (1.0 / b.upper - 1.0 / b.lower);
}

std::vector<TimeInterval> covering_intervals(long t) {
    if (t < 1) throw std::invalid_argument("covering_intervals: t must be >= 1");
    std::vector<TimeInterval> out;
    for (long size = 1; size <= t; size <<= 1) {
        const long first = (t / size) * size;
        out.push_back({first, first + size - 1});
    }
    return out;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const BettingGrid> BettingGrid::make(const LambdaInterval &interval, const EstimatorBounds &bounds,
                                                     int size) {
    if (size < 1) throw std::invalid_argument("grid size must be positive");
    if (!(interval.lo < interval.hi)) throw std::invalid_argument("grid interval is empty");
    auto g = std::make_shared<BettingGrid>();
    g->interval = interval;
    g->lower = bounds.lower;
    g->upper = bounds.upper;
    const double mid = 0.5 * (interval.lo + interval.hi);
    const double half = 0.5 * interval.width();
    for (int k = size; k >= 1; --k) {
        const double x = std::cos((2.0 * k - 1.0) * M_PI / (2.0 * size));
        g->lambdas.push_back(mid + half * x);
    }
    g->prior.assign(static_cast<std::size_t>(size), 1.0 / size);
    for (double lam : g->lambdas) {
        if (1.0 + lam * bounds.lower <= 0.0 || 1.0 + lam * bounds.upper <= 0.0) {
            throw std::invalid_argument("grid interval admits nonpositive increments");
        }
    }
    return g;
}

void BettingGrid::log_increments(double o_hat, std::vector<double> &out) const {
    const double tol = 1e-9 * (upper - lower);
    if (!(o_hat >= lower - tol && o_hat <= upper + tol)) {
        throw std::invalid_argument("estimate " + std::to_string(o_hat) + " outside [" + std::to_string(lower) + ", " +
                                    std::to_string(upper) + "]");
    }
    out.resize(lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) out[k] = std::log1p(lambdas[k] * o_hat);
}

// ---------------------------------------------------------------------------

UPExpert::UPExpert(std::shared_ptr<const BettingGrid> grid, long start_time)
    : grid_(std::move(grid)), start_(start_time), log_wealth_(grid_->lambdas.size(), 0.0) {}

double UPExpert::bet() const {
    if (cached_bet_) return *cached_bet_;
    const double top = *std::max_element(log_wealth_.begin(), log_wealth_.end());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < log_wealth_.size(); ++k) {
        const double w = grid_->prior[k] * std::exp(log_wealth_[k] - top);
        num += w * grid_->lambdas[k];
        den += w;
    }
    // Clamp against rounding at the edges of the grid.
    const double lam = std::clamp(num / den, grid_->lambdas.front(), grid_->lambdas.back());
    cached_bet_ = lam;
    return lam;
}

void UPExpert::update(double o_hat) {
    std::vector<double> logs;
    grid_->log_increments(o_hat, logs);
    update_logs(logs);
}

void UPExpert::update_logs(std::span<const double> logs) {
    if (logs.size() != log_wealth_.size()) throw std::invalid_argument("log increment vector has wrong length");
    for (std::size_t k = 0; k < logs.size(); ++k) log_wealth_[k] += logs[k];
    cached_bet_.reset();
}

// ---------------------------------------------------------------------------

CbceBettor::CbceBettor(const LambdaInterval &interval, const EstimatorBounds &bounds, int grid_size)
    : grid_(BettingGrid::make(interval, bounds, grid_size)) {
    double b = 0.0;
    for (double lam : {interval.lo, interval.hi}) {
        for (double o : {bounds.lower, bounds.upper}) b = std::max(b, std::abs(std::log1p(lam * o)));
    }
    loss_scale_ = b > 0.0 ? b : 1.0;
}

void CbceBettor::advance() {
    ++time_;
    const long t = time_;
    std::erase_if(active_, [t](const ActiveExpert &e) { return e.span.last < t; });
    for (const auto &iv : covering_intervals(t)) {
        if (iv.first != t) continue;
        const double ft = static_cast<double>(t);
        const double level = static_cast<double>(std::bit_width(static_cast<unsigned long>(t)) - 1);
        active_.push_back({iv, UPExpert(grid_, t), 1.0 / (ft * ft * (1.0 + level))});
    }
    double total = 0.0;
    p_.assign(active_.size(), 0.0);
    for (std::size_t j = 0; j < active_.size(); ++j) {
        auto &e = active_[j];
        e.bet = e.expert.bet();
        e.weight = e.sum_g / static_cast<double>(e.rounds + 1) * e.wealth;
        p_[j] = e.prior * std::max(0.0, e.weight);
        total += p_[j];
    }
    if (!(total > 0.0)) {
        total = 0.0;
        for (std::size_t j = 0; j < active_.size(); ++j) total += (p_[j] = active_[j].prior);
    }
    meta_bet_ = 0.0;
    for (std::size_t j = 0; j < active_.size(); ++j) {
        p_[j] /= total;
        meta_bet_ += p_[j] * active_[j].bet;
    }
    meta_bet_ = std::clamp(meta_bet_, grid_->interval.lo, grid_->interval.hi);
}

double CbceBettor::bet() {
    if (!pending_) {
        advance();
        pending_ = true;
    }
    return meta_bet_;
}

void CbceBettor::observe(double o_hat) {
    if (!pending_) throw std::logic_error("observe() without a pending bet");
    grid_->log_increments(o_hat, logs_);
    pending_ = false;
    const double two_b = 2.0 * loss_scale_;
    const double meta_log = std::log1p(meta_bet_ * o_hat);
    for (auto &e : active_) {
        double g = std::clamp((std::log1p(e.bet * o_hat) - meta_log) / two_b, -1.0, 1.0);
        if (e.weight <= 0.0) g = std::max(g, 0.0);
        e.sum_g += g;
        e.wealth += g * e.weight;
        ++e.rounds;
        if (o_hat != 0.0) e.expert.update_logs(logs_);
    }
}

double CbceBettor::step(std::optional<double> previous) {
    if (time_ == 0 && !pending_) {
        if (previous) throw std::logic_error("no bet was placed before the first step");
    } else {
        if (!previous) throw std::logic_error("the previous estimate is required after the first step");
        if (!pending_) throw std::logic_error("out-of-order CBCE step");
        observe(*previous);
    }
    return bet();
}

// ---------------------------------------------------------------------------

ConstantBettor::ConstantBettor(const LambdaInterval &interval, double lambda) : lambda_(lambda) {
    if (!interval.contains(lambda)) {
        throw std::invalid_argument("constant bet " + std::to_string(lambda) + " outside the betting interval");
    }
}

double Bettor::bet() {
    return std::visit([](auto &b) { return b.bet(); }, impl_);
}

void Bettor::observe(double o_hat) {
    std::visit([o_hat](auto &b) { b.observe(o_hat); }, impl_);
}

// ---------------------------------------------------------------------------

namespace {

bool enumerable(Ensemble kind, int d) {
    return (kind == Ensemble::local && d <= 3) || (kind == Ensemble::joint && d == 1);
}

std::vector<double> lambda_grid(const LambdaInterval &iv, int points) {
    std::vector<double> out;
    for (int k = 0; k < points; ++k) {
        out.push_back(points == 1 ? 0.0 : iv.lo + iv.width() * k / (points - 1));
    }
    out.push_back(0.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

GrowthEstimate estimate_growth_rate(const DensityMatrix &rho1, std::span<const Observable> observables, Ensemble kind,
                                    Rng &rng, const GrowthOptions &options) {
    if (options.grid_points < 1) throw std::invalid_argument("growth: empty lambda grid");
    if (observables.empty()) throw std::invalid_argument("growth: no observables");
    const int d = rho1.num_qubits();
    const std::size_t n = observables.size();

    // Weighted samples of o_hat per observable.
    std::vector<std::map<double, double>> dist(n);
    GrowthEstimate out;
    out.exact = enumerable(kind, d);
    if (out.exact) {
        const auto settings = enumerate_settings(kind, d);
        const double ws = 1.0 / static_cast<double>(settings.size());
        for (const auto &s : settings) {
            const auto probs = outcome_probabilities(rho1, s);
            for (Outcome x = 0; x < probs.size(); ++x) {
                if (probs[x] == 0.0) continue;
                for (std::size_t i = 0; i < n; ++i) dist[i][estimate_observable(s, x, observables[i])] += ws * probs[x];
            }
        }
    } else {
        if (options.shots < 1) throw std::invalid_argument("growth: shots must be positive");
        const double w = 1.0 / static_cast<double>(options.shots);
        for (long k = 0; k < options.shots; ++k) {
            const auto s = sample_setting(kind, d, rng);
            const Outcome x = measure(rho1, s, rng);
            for (std::size_t i = 0; i < n; ++i) dist[i][estimate_observable(s, x, observables[i])] += w;
        }
    }

    out.per_observable.resize(n);
    out.per_observable_lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto bounds = estimator_bounds(observables[i], kind, options.bounds_mode, d);
        const auto iv = lambda_interval(bounds, relative_slack(bounds, options.slack_fraction));
        double best = 0.0, best_lambda = 0.0;
        for (double lam : lambda_grid(iv, options.grid_points)) {
            double g = 0.0;
            for (const auto &[v, p] : dist[i]) g += p * std::log1p(lam * v);
            if (g > best) {
                best = g;
                best_lambda = lam;
            }
        }
        out.per_observable[i] = best;
        out.per_observable_lambda[i] = best_lambda;
        if (i == 0 || best > out.d_star) {
            out.d_star = best;
            out.i_star = i;
            out.lambda_star = best_lambda;
        }
    }
    return out;
}

}  // namespace qcpd
