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

#include "qcpd/matched.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcpd {

ProjectiveMeasurement::ProjectiveMeasurement(const Observable &obs)
    : eig_(obs.eigensystem()), v_adjoint_(obs.eigensystem().eigenvectors.adjoint()) {}

std::vector<double> ProjectiveMeasurement::probabilities(const DensityMatrix &rho) const {
    if (rho.dim() != v_adjoint_.dim()) {
        throw std::invalid_argument("projective measurement: state has dimension " + std::to_string(rho.dim()) +
                                    ", expected " + std::to_string(v_adjoint_.dim()));
    }
    return born_probabilities(rho, v_adjoint_);
}

double projective_measure(const ProjectiveMeasurement &pm, const DensityMatrix &rho, Rng &rng) {
    const auto probs = pm.probabilities(rho);
    return pm.outcome_values()[sample_index(probs, rng)];
}

UCBStats::UCBStats(std::size_t n, double delta_) : counts(n, 0), increment_sums(n, 0.0), delta(delta_) {
    if (n == 0) throw std::invalid_argument("UCB needs at least one arm");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("UCB delta must lie in (0, 1)");
}

void UCBStats::record(std::size_t i, double increment) {
    if (i >= counts.size()) throw std::out_of_range("UCB index out of range");
    ++counts[i];
    increment_sums[i] += increment;
}

std::size_t select_index(SchedulePolicy mode, long t, std::size_t n, const UCBStats *stats) {
    if (t < 1) throw std::invalid_argument("select_index: t must be >= 1");
    if (n == 0) throw std::invalid_argument("select_index: n must be positive");
    if (mode == SchedulePolicy::round_robin) return static_cast<std::size_t>((t - 1) % static_cast<long>(n));
    if (!stats || stats->size() != n) throw std::invalid_argument("select_index: UCB needs stats for every index");
    for (std::size_t j = 0; j < n; ++j) {
        if (stats->counts[j] == 0) return j;
    }
    const double c = 2.0 * std::log(1.0 / stats->delta);
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
        const double nj = static_cast<double>(stats->counts[j]);
        const double score = stats->increment_sums[j] / nj + std::sqrt(c / nj);
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

}  // namespace qcpd
