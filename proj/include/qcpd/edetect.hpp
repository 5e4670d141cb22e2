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
#include <optional>
#include <span>
#include <vector>

namespace qcpd {

enum class DetectorKind { sr, cusum };

/// SR and CUSUM statistics of one observable stream.
///
/// Each value is stored as mantissa * exp(offset). The offset only moves
/// once a mantissa passes kPromoteAbove, so small statistics stay exact.
struct PerObservableState {
    double m_sr = 0.0;
    double m_cu = 0.0;
    double log_offset_sr = 0.0;
    double log_offset_cu = 0.0;

    static constexpr double kPromoteAbove = 1e12;

    /// Linear values; may be +inf once the offset is large.
    double sr() const;
    double cusum() const;
    /// Natural logs (-inf for a zero statistic).
    double log_sr() const;
    double log_cusum() const;
};

struct DetectorConfig {
    std::vector<double> weights;
    double alpha = 0.01;
    DetectorKind kind = DetectorKind::sr;
    /// c_alpha for the CUSUM rule; 1/alpha when unset.
    std::optional<double> cusum_threshold;

    static DetectorConfig uniform(std::size_t n, double alpha, DetectorKind kind);

    double threshold() const;
    /// Throws std::invalid_argument on empty or nonpositive weights, weights
    /// not summing to 1 within 1e-12, alpha outside (0,1) or a bad c_alpha.
    void validate() const;
};

enum class Decision { proceed, stop };

struct DetectorOutput {
    double mixture = 0.0;
    Decision decision = Decision::proceed;
    std::vector<PerObservableState> per_obs;
};

/// L = 1 + lambda * o_hat. Throws std::invalid_argument when L <= 0.
double baseline_increment(double lambda, double o_hat);

/// Same, additionally requiring lambda in the open interval (-1/u, -1/l) and
/// o_hat in [l, u] (1e-9 tolerance), so that L > 0 for every possible estimate.
double baseline_increment(double lambda, double o_hat, double lower, double upper);

/// m_sr <- L (m_sr + 1). Throws std::invalid_argument unless L > 0 and finite.
PerObservableState sr_update(PerObservableState state, double increment);

/// m_cu <- L max(m_cu, 1). Throws std::invalid_argument unless L > 0 and finite.
PerObservableState cusum_update(PerObservableState state, double increment);

/// sum_i w_i m_i for the configured kind.
double mixture_statistic(const DetectorConfig &config, std::span<const PerObservableState> per_obs);

/// Natural log of the mixture; finite even when the linear value overflows.
double log_mixture_statistic(const DetectorConfig &config, std::span<const PerObservableState> per_obs);

/// Mixture e-detector over n observable streams.
///
/// Both recursions are maintained for every observable; the configured kind
/// drives the mixture and the decision. The detector stops on M >= threshold
/// and any further step throws std::logic_error.
class EDetector {
  public:
    explicit EDetector(DetectorConfig config);

    std::size_t size() const { return states_.size(); }
    const DetectorConfig &config() const { return config_; }
    bool stopped() const { return stopped_; }
    long time() const { return time_; }

    /// One increment per observable.
    const DetectorOutput &step(std::span<const double> increments);

    /// Updates observable i only; the other states are left unchanged.
    const DetectorOutput &step_selected(std::size_t i, double increment);

    const DetectorOutput &last() const { return out_; }
    std::span<const PerObservableState> states() const { return states_; }

  private:
    const DetectorOutput &finish_step();
    void check_running() const;

    DetectorConfig config_;
    std::vector<PerObservableState> states_;
    DetectorOutput out_;
    bool stopped_ = false;
    long time_ = 0;
};

/// Functional form of one detector step on caller-held states. `stopped`
/// carries the stop flag between calls; stepping with it set throws.
DetectorOutput step_and_decide(const DetectorConfig &config, std::vector<PerObservableState> &per_obs,
                               std::span<const double> increments, bool &stopped);

}  // namespace qcpd
