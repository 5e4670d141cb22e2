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
#include <vector>

#include "qcpd/qcore.hpp"
#include "qcpd/rng.hpp"

namespace qcpd {

/// Projective measurement in the eigenbasis of an observable. Outcomes are
/// reported as eigenvalues, so degenerate eigenspaces need no tie handling.
class ProjectiveMeasurement {
  public:
    explicit ProjectiveMeasurement(const Observable &obs);

    const EigenSystem &eigensystem() const { return eig_; }
    const std::vector<double> &outcome_values() const { return eig_.eigenvalues; }
    int num_qubits() const { return eig_.eigenvectors.num_qubits(); }

    /// <v_x|rho|v_x> for every eigenvector.
    std::vector<double> probabilities(const DensityMatrix &rho) const;

  private:
    EigenSystem eig_;
    ComplexMatrix v_adjoint_;
};

/// Draws an eigenvalue with Born probabilities. Throws std::invalid_argument
/// on a dimension mismatch.
double projective_measure(const ProjectiveMeasurement &pm, const DensityMatrix &rho, Rng &rng);

enum class SchedulePolicy { round_robin, ucb };

struct UCBStats {
    std::vector<long> counts;
    std::vector<double> increment_sums;
    double delta = 0.1;

    explicit UCBStats(std::size_t n, double delta = 0.1);

    std::size_t size() const { return counts.size(); }
    /// Records increment L for index i.
    void record(std::size_t i, double increment);
};

/// Index (0-based) of the observable to measure at time t >= 1.
///
/// Round robin: (t - 1) mod n. UCB: every index is forced once in order, then
/// argmax_j mean_j + sqrt(2 log(1/delta) / N(j)), ties to the smallest index.
std::size_t select_index(SchedulePolicy mode, long t, std::size_t n, const UCBStats *stats = nullptr);

}  // namespace qcpd
