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

#include <cstdint>
#include <span>
#include <vector>

#include "qcpd/qcore.hpp"
#include "qcpd/rng.hpp"

namespace qcpd {

enum class Ensemble { local, joint };

/// Single-qubit measurement basis of the local ensemble. The rotation applied
/// before the computational-basis readout is I, H and H S^dag respectively.
enum class LocalBasis : std::uint8_t { Z = 0, X = 1, Y = 2 };

enum class BoundsMode { analytic, exhaustive };

/// Largest qubit count for dense joint-Clifford settings.
inline constexpr int kMaxJointQubits = 6;

/// One randomized measurement: local bases or a dense joint Clifford.
class MeasurementSetting {
  public:
    static MeasurementSetting local(std::vector<LocalBasis> bases);
    /// Throws std::invalid_argument if `u` is not unitary within 1e-8.
    static MeasurementSetting joint(ComplexMatrix u);

    Ensemble kind() const { return kind_; }
    int num_qubits() const { return num_qubits_; }

    /// Present iff kind() == local.
    const std::vector<LocalBasis> &local_bases() const { return bases_; }
    /// Present iff kind() == joint.
    const ComplexMatrix &joint_unitary() const { return unitary_; }

    /// Dense rotation U; materialized on demand for local settings.
    ComplexMatrix unitary() const;

    bool operator==(const MeasurementSetting &other) const;

  private:
    MeasurementSetting() = default;
    Ensemble kind_ = Ensemble::local;
    int num_qubits_ = 0;
    std::vector<LocalBasis> bases_;
    ComplexMatrix unitary_;
};

/// Inverse-channel image of one snapshot; unit trace, Hermitian, not PSD.
struct ShadowEstimate {
    ComplexMatrix mat;
};

struct EstimatorBounds {
    double lower = 0.0;
    double upper = 0.0;
    BoundsMode mode = BoundsMode::analytic;
};

/// Uniform draw: i.i.d. bases for local (d <= 10), a uniformly random
/// Clifford for joint (d <= 6).
MeasurementSetting sample_setting(Ensemble kind, int d, Rng &rng);

/// Every setting of an enumerable ensemble, each carrying equal probability:
/// 3^d local settings for d <= 3, the 24 Cliffords for joint d = 1.
std::vector<MeasurementSetting> enumerate_settings(Ensemble kind, int d);

/// Born distribution of the computational-basis readout after rotating by U.
std::vector<double> outcome_probabilities(const DensityMatrix &rho, const MeasurementSetting &setting);

Outcome measure(const DensityMatrix &rho, const MeasurementSetting &setting, Rng &rng);

/// Local: (x)_k (3 U_k^dag|x_k><x_k|U_k - I). Joint: (2^d + 1) U^dag|x><x|U - I.
ShadowEstimate shadow_estimate(const MeasurementSetting &setting, Outcome x);

/// Bitstring form; throws std::invalid_argument unless bits.size() == d.
ShadowEstimate shadow_estimate(const MeasurementSetting &setting, std::span<const std::uint8_t> bits);

/// Tr(O rho_hat) from a materialized shadow.
double estimate_observable(const ShadowEstimate &shadow, const Observable &obs);

/// Tr(O rho_hat) without materializing the shadow.
///
/// Local settings use the cached Pauli expansion of O: a term contributes its
/// coefficient times a per-qubit factor that is 1 on identity letters,
/// 3(-1)^{x_k} when the letter matches the measured basis and 0 otherwise.
/// Joint settings use (2^d + 1) <psi|O|psi> - Tr(O) with psi = U^dag|x>.
double estimate_observable(const MeasurementSetting &setting, Outcome x, const Observable &obs);

/// Range [l, u] of the single-shot estimator.
///
/// Analytic local: +-3^{|S|} ||O||. Analytic joint:
/// (2^d + 1) lambda_min(O) - Tr(O) and (2^d + 1) lambda_max(O) - Tr(O).
/// Exhaustive: exact extremes over all (setting, outcome) pairs; available for
/// local d <= 3 and joint d = 1, std::invalid_argument otherwise.
EstimatorBounds estimator_bounds(const Observable &obs, Ensemble kind, BoundsMode mode, int d);

/// Measurement channel R(rho) by full enumeration of settings and outcomes.
ComplexMatrix exact_channel_apply(const DensityMatrix &rho, Ensemble kind, int d);

}  // namespace qcpd
