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

#include "qcpd/edetect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcpd {

namespace {

const double kLogPromote = std::log(PerObservableState::kPromoteAbove);

void check_increment(double increment) {
    if (!(increment > 0.0) || !std::isfinite(increment)) {
        throw std::invalid_argument("increment must be positive and finite, got " + std::to_string(increment));
    }
}

double log_value(double m, double offset) {
    if (m <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(m) + offset;
}

// Keep the mantissa in a comfortable range.
void renormalize(double &m, double &offset) {
    while (m > PerObservableState::kPromoteAbove) {
        m /= PerObservableState::kPromoteAbove;
        offset += kLogPromote;
    }
    while (offset > 0.0 && m < 1.0) {
        m *= PerObservableState::kPromoteAbove;
        offset -= kLogPromote;
    }
    if (offset < 1e-9) offset = 0.0;
}

}  // namespace

double PerObservableState::sr() const { return log_offset_sr == 0.0 ? m_sr : m_sr * std::exp(log_offset_sr); }
double PerObservableState::cusum() const { return log_offset_cu == 0.0 ? m_cu : m_cu * std::exp(log_offset_cu); }
double PerObservableState::log_sr() const { return log_value(m_sr, log_offset_sr); }
double PerObservableState::log_cusum() const { return log_value(m_cu, log_offset_cu); }

DetectorConfig DetectorConfig::uniform(std::size_t n, double alpha, DetectorKind kind) {
    if (n == 0) throw std::invalid_argument("need at least one observable");
    DetectorConfig c;
    c.weights.assign(n, 1.0 / static_cast<double>(n));
    c.alpha = alpha;
    c.kind = kind;
    return c;
}

double DetectorConfig::threshold() const {
    if (kind == DetectorKind::cusum && cusum_threshold) return *cusum_threshold;
    return 1.0 / alpha;
}

void DetectorConfig::validate() const {
    if (weights.empty()) throw std::invalid_argument("weights: empty");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights: entries must be positive");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("weights: must sum to 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha: must lie in (0, 1)");
    if (cusum_threshold && !(*cusum_threshold > 0.0 && std::isfinite(*cusum_threshold))) {
        throw std::invalid_argument("cusum_threshold: must be positive");
    }
}

double baseline_increment(double lambda, double o_hat) {
    const double l = 1.0 + lambda * o_hat;
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw std::invalid_argument("bet " + std::to_string(lambda) + " on estimate " + std::to_string(o_hat) +
                                    " gives a nonpositive increment");
    }
    return l;
}

double baseline_increment(double lambda, double o_hat, double lower, double upper) {
    if (!(lower < 0.0 && upper > 0.0)) throw std::invalid_argument("estimator range must straddle 0");
    if (!(lambda > -1.0 / upper && lambda < -1.0 / lower)) {
        throw std::invalid_argument("bet " + std::to_string(lambda) + " outside the admissible interval");
    }
    const double tol = 1e-9 * std::max(1.0, upper - lower);
    if (o_hat < lower - tol || o_hat > upper + tol) {
        throw std::invalid_argument("estimate " + std::to_string(o_hat) + " outside its range");
    }
    return baseline_increment(lambda, o_hat);
}

PerObservableState sr_update(PerObservableState s, double increment) {
    check_increment(increment);
    const double one = s.log_offset_sr == 0.0 ? 1.0 : std::exp(-s.log_offset_sr);
    s.m_sr = increment * (s.m_sr + one);
    renormalize(s.m_sr, s.log_offset_sr);
    return s;
}

PerObservableState cusum_update(PerObservableState s, double increment) {
    check_increment(increment);
    const double one = s.log_offset_cu == 0.0 ? 1.0 : std::exp(-s.log_offset_cu);
    s.m_cu = increment * std::max(s.m_cu, one);
    renormalize(s.m_cu, s.log_offset_cu);
    return s;
}

double mixture_statistic(const DetectorConfig &config, std::span<const PerObservableState> per_obs) {
    if (per_obs.size() != config.weights.size()) {
        throw std::invalid_argument("mixture: " + std::to_string(per_obs.size()) + " states for " +
                                    std::to_string(config.weights.size()) + " weights");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < per_obs.size(); ++i) {
        total += config.weights[i] * (config.kind == DetectorKind::sr ? per_obs[i].sr() : per_obs[i].cusum());
    }
    return total;
}

double log_mixture_statistic(const DetectorConfig &config, std::span<const PerObservableState> per_obs) {
    if (per_obs.size() != config.weights.size()) throw std::invalid_argument("mixture: length mismatch");
    std::vector<double> terms(per_obs.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < per_obs.size(); ++i) {
        const double lv = config.kind == DetectorKind::sr ? per_obs[i].log_sr() : per_obs[i].log_cusum();
        terms[i] = std::log(config.weights[i]) + lv;
        top = std::max(top, terms[i]);
    }
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    return top + std::log(acc);
}

namespace {

Decision decide(const DetectorConfig &config, std::span<const PerObservableState> per_obs, double &mixture) {
    mixture = mixture_statistic(config, per_obs);
    const double thr = config.threshold();
    if (std::isfinite(mixture)) return mixture >= thr ? Decision::stop : Decision::proceed;
    return log_mixture_statistic(config, per_obs) >= std::log(thr) ? Decision::stop : Decision::proceed;
}

}  // namespace

EDetector::EDetector(DetectorConfig config) : config_(std::move(config)) {
    config_.validate();
    states_.assign(config_.weights.size(), PerObservableState{});
}

void EDetector::check_running() const {
    if (stopped_) throw std::logic_error("detector already stopped");
}

const DetectorOutput &EDetector::finish_step() {
    ++time_;
    out_.decision = decide(config_, states_, out_.mixture);
    out_.per_obs = states_;
    stopped_ = out_.decision == Decision::stop;
    return out_;
}

const DetectorOutput &EDetector::step(std::span<const double> increments) {
    check_running();
    if (increments.size() != states_.size()) {
        throw std::invalid_argument("step: expected " + std::to_string(states_.size()) + " increments");
    }
    for (double l : increments) check_increment(l);
    for (std::size_t i = 0; i < states_.size(); ++i) {
        states_[i] = cusum_update(sr_update(states_[i], increments[i]), increments[i]);
    }
    return finish_step();
}

const DetectorOutput &EDetector::step_selected(std::size_t i, double increment) {
    check_running();
    if (i >= states_.size()) throw std::out_of_range("step_selected: index out of range");
    states_[i] = cusum_update(sr_update(states_[i], increment), increment);
    return finish_step();
}

DetectorOutput step_and_decide(const DetectorConfig &config, std::vector<PerObservableState> &per_obs,
                               std::span<const double> increments, bool &stopped) {
    if (stopped) throw std::logic_error("detector already stopped");
    config.validate();
    if (increments.size() != per_obs.size() || per_obs.size() != config.weights.size()) {
        throw std::invalid_argument("step_and_decide: length mismatch");
    }
    for (double l : increments) check_increment(l);
    for (std::size_t i = 0; i < per_obs.size(); ++i) {
        per_obs[i] = cusum_update(sr_update(per_obs[i], increments[i]), increments[i]);
    }
    DetectorOutput out;
    out.decision = decide(config, per_obs, out.mixture);
    out.per_obs = per_obs;
    stopped = out.decision == Decision::stop;
    return out;
}

}  // namespace qcpd
