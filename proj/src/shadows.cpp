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

#include "qcpd/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcpd/clifford.hpp"

namespace qcpd {

namespace {

ComplexMatrix basis_rotation(LocalBasis b) {
    switch (b) {
        case LocalBasis::Z: return gates::I();
        case LocalBasis::X: return gates::H();
        case LocalBasis::Y: return gates::H() * gates::S().adjoint();
    }
    return gates::I();
}

// diag(U rho U^dag) for a U already known to be unitary.
std::vector<double> diag_conjugated(const DensityMatrix &rho, const ComplexMatrix &u) {
    const std::size_t n = rho.dim();
    const ComplexMatrix &r = rho.mat();
    std::vector<double> probs(n);
    std::vector<Complex> row(n);
    for (std::size_t x = 0; x < n; ++x) {
        // (U rho)_{x,b} then contract with conj(U_{x,b}).
        std::fill(row.begin(), row.end(), Complex{});
        for (std::size_t a = 0; a < n; ++a) {
            const Complex uxa = u(x, a);
            if (uxa == Complex{}) continue;
            for (std::size_t b = 0; b < n; ++b) row[b] += uxa * r(a, b);
        }
        Complex acc{};
        for (std::size_t b = 0; b < n; ++b) acc += row[b] * std::conj(u(x, b));
        probs[x] = acc.real();
    }
    detail::sanitize_probabilities(probs);
    return probs;
}

void check_outcome(const MeasurementSetting &s, Outcome x) {
    if (x >= (Outcome{1} << s.num_qubits())) {
        throw std::invalid_argument("outcome " + std::to_string(x) + " has more than " +
                                    std::to_string(s.num_qubits()) + " bits");
    }
}

double local_factor(PauliOp op, LocalBasis basis, int bit) {
    if (op == PauliOp::I) return 1.0;
    const bool match = (op == PauliOp::X && basis == LocalBasis::X) || (op == PauliOp::Y && basis == LocalBasis::Y) ||
                       (op == PauliOp::Z && basis == LocalBasis::Z);
    if (!match) return 0.0;
    return bit == 0 ? 3.0 : -3.0;
}

double dense_trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    const std::size_t n = a.dim();
    Complex acc{};
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) acc += a(r, c) * b(c, r);
    return acc.real();
}

void check_enumerable(Ensemble kind, int d) {
    const bool ok = (kind == Ensemble::local && d >= 1 && d <= 3) || (kind == Ensemble::joint && d == 1);
    if (!ok) {
        throw std::invalid_argument("ensemble is only enumerable for local d <= 3 or joint d = 1 (got d = " +
                                    std::to_string(d) + ")");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// MeasurementSetting

MeasurementSetting MeasurementSetting::local(std::vector<LocalBasis> bases) {
    detail::check_qubits(static_cast<int>(bases.size()));
    MeasurementSetting s;
    s.kind_ = Ensemble::local;
    s.num_qubits_ = static_cast<int>(bases.size());
    s.bases_ = std::move(bases);
    return s;
}

MeasurementSetting MeasurementSetting::joint(ComplexMatrix u) {
    detail::check_qubits(u.num_qubits(), kMaxJointQubits);
    if (!u.is_unitary(1e-8)) {
        throw std::invalid_argument("joint measurement matrix is not unitary");
    }
    MeasurementSetting s;
    s.kind_ = Ensemble::joint;
    s.num_qubits_ = u.num_qubits();
    s.unitary_ = std::move(u);
    return s;
}

ComplexMatrix MeasurementSetting::unitary() const {
    if (kind_ == Ensemble::joint) return unitary_;
    ComplexMatrix u = basis_rotation(bases_[0]);
    for (std::size_t k = 1; k < bases_.size(); ++k) u = kron(u, basis_rotation(bases_[k]));
    return u;
}

bool MeasurementSetting::operator==(const MeasurementSetting &other) const {
    if (kind_ != other.kind_ || num_qubits_ != other.num_qubits_) return false;
    if (kind_ == Ensemble::local) return bases_ == other.bases_;
    return unitary_.max_abs_diff(other.unitary_) == 0.0;
}

// ---------------------------------------------------------------------------
// Sampling and enumeration

MeasurementSetting sample_setting(Ensemble kind, int d, Rng &rng) {
    if (kind == Ensemble::local) {
        detail::check_qubits(d);
        std::vector<LocalBasis> bases(static_cast<std::size_t>(d));
        for (auto &b : bases) b = static_cast<LocalBasis>(rng.below(3));
        return MeasurementSetting::local(std::move(bases));
    }
    detail::check_qubits(d, kMaxJointQubits);
    // The measurement rotation is U = C^dag; C is uniform, hence so is U.
    const ComplexMatrix c = tableau_to_unitary(random_clifford_tableau(d, rng));
    return MeasurementSetting::joint(c.adjoint());
}

std::vector<MeasurementSetting> enumerate_settings(Ensemble kind, int d) {
    check_enumerable(kind, d);
    std::vector<MeasurementSetting> out;
    if (kind == Ensemble::joint) {
        for (const auto &t : all_single_qubit_cliffords()) {
            out.push_back(MeasurementSetting::joint(tableau_to_unitary(t).adjoint()));
        }
        return out;
    }
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<LocalBasis> bases(static_cast<std::size_t>(d));
        std::size_t rest = code;
        for (int k = d - 1; k >= 0; --k) {
            bases[static_cast<std::size_t>(k)] = static_cast<LocalBasis>(rest % 3);
            rest /= 3;
        }
        out.push_back(MeasurementSetting::local(std::move(bases)));
    }
    return out;
}

std::vector<double> outcome_probabilities(const DensityMatrix &rho, const MeasurementSetting &setting) {
    if (rho.num_qubits() != setting.num_qubits()) {
        throw std::invalid_argument("state and measurement setting differ in qubit count");
    }
    if (setting.kind() == Ensemble::joint) return diag_conjugated(rho, setting.joint_unitary());
    return diag_conjugated(rho, setting.unitary());
}

Outcome measure(const DensityMatrix &rho, const MeasurementSetting &setting, Rng &rng) {
    const auto probs = outcome_probabilities(rho, setting);
    return static_cast<Outcome>(sample_index(probs, rng));
}

// ---------------------------------------------------------------------------
// Shadows and estimators

ShadowEstimate shadow_estimate(const MeasurementSetting &setting, Outcome x) {
    check_outcome(setting, x);
    const int d = setting.num_qubits();
    if (setting.kind() == Ensemble::joint) {
        const ComplexMatrix &u = setting.joint_unitary();
        const std::size_t n = u.dim();
        std::vector<Complex> psi(n);
        for (std::size_t r = 0; r < n; ++r) psi[r] = std::conj(u(x, r));  // U^dag|x>
        ComplexMatrix m = projector(psi) * Complex(static_cast<double>(n + 1));
        m -= ComplexMatrix::identity(n);
        return {std::move(m)};
    }
    ComplexMatrix out;
    for (int k = 0; k < d; ++k) {
        const ComplexMatrix rot = basis_rotation(setting.local_bases()[static_cast<std::size_t>(k)]);
        const int bit = outcome_bit(x, k, d);
        std::vector<Complex> v{std::conj(rot(static_cast<std::size_t>(bit), 0)),
                               std::conj(rot(static_cast<std::size_t>(bit), 1))};
        ComplexMatrix factor = projector(v) * Complex(3.0) - gates::I();
        out = k == 0 ? factor : kron(out, factor);
    }
    return {std::move(out)};
}

ShadowEstimate shadow_estimate(const MeasurementSetting &setting, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != setting.num_qubits()) {
        throw std::invalid_argument("bitstring length " + std::to_string(bits.size()) + " != " +
                                    std::to_string(setting.num_qubits()) + " qubits");
    }
    Outcome x = 0;
    for (auto b : bits) {
        if (b > 1) throw std::invalid_argument("bitstring entries must be 0 or 1");
        x = (x << 1) | b;
    }
    return shadow_estimate(setting, x);
}

double estimate_observable(const ShadowEstimate &shadow, const Observable &obs) {
    if (shadow.mat.dim() != obs.dim()) {
        throw std::invalid_argument("shadow and observable differ in dimension");
    }
    return dense_trace_product(obs.mat(), shadow.mat);
}

double estimate_observable(const MeasurementSetting &setting, Outcome x, const Observable &obs) {
    if (setting.num_qubits() != obs.num_qubits()) {
        throw std::invalid_argument("setting and observable differ in qubit count");
    }
    check_outcome(setting, x);
    const int d = setting.num_qubits();
    if (setting.kind() == Ensemble::local && obs.pauli_terms()) {
        double total = 0.0;
        for (const auto &term : *obs.pauli_terms()) {
            double prod = term.coefficient;
            for (int k = 0; k < d && prod != 0.0; ++k) {
                prod *= local_factor(term.ops[static_cast<std::size_t>(k)],
                                     setting.local_bases()[static_cast<std::size_t>(k)], outcome_bit(x, k, d));
            }
            total += prod;
        }
#ifndef NDEBUG
        const double dense = estimate_observable(shadow_estimate(setting, x), obs);
        if (std::abs(dense - total) > 1e-9 * std::max(1.0, std::abs(dense))) {
            throw std::logic_error("Pauli fast path disagrees with dense trace");
        }
#endif
        return total;
    }
    if (setting.kind() == Ensemble::local) {
        return estimate_observable(shadow_estimate(setting, x), obs);
    }
    const ComplexMatrix &u = setting.joint_unitary();
    const std::size_t n = u.dim();
    Complex acc{};
    for (std::size_t r = 0; r < n; ++r) {
        const Complex pr = u(x, r);  // conj(psi_r)
        if (pr == Complex{}) continue;
        for (std::size_t c = 0; c < n; ++c) acc += pr * obs.mat()(r, c) * std::conj(u(x, c));
    }
    return static_cast<double>(n + 1) * acc.real() - obs.trace();
}

EstimatorBounds estimator_bounds(const Observable &obs, Ensemble kind, BoundsMode mode, int d) {
    if (obs.num_qubits() != d) {
        throw std::invalid_argument("observable acts on " + std::to_string(obs.num_qubits()) + " qubits, not " +
                                    std::to_string(d));
    }
    if (mode == BoundsMode::analytic) {
        if (kind == Ensemble::local) {
            const double scale = std::pow(3.0, static_cast<double>(obs.support().size())) * obs.op_norm();
            return {-scale, scale, mode};
        }
        const double factor = std::ldexp(1.0, d) + 1.0;
        return {factor * obs.lambda_min() - obs.trace(), factor * obs.lambda_max() - obs.trace(), mode};
    }
    check_enumerable(kind, d);
    EstimatorBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), mode};
    const Outcome outcomes = Outcome{1} << d;
    for (const auto &s : enumerate_settings(kind, d)) {
        for (Outcome x = 0; x < outcomes; ++x) {
            const double v = estimate_observable(shadow_estimate(s, x), obs);
            b.lower = std::min(b.lower, v);
            b.upper = std::max(b.upper, v);
        }
    }
    return b;
}

ComplexMatrix exact_channel_apply(const DensityMatrix &rho, Ensemble kind, int d) {
    check_enumerable(kind, d);
    if (rho.num_qubits() != d) {
        throw std::invalid_argument("state qubit count does not match d");
    }
    const auto settings = enumerate_settings(kind, d);
    const std::size_t n = rho.dim();
    ComplexMatrix out(n);
    const double weight = 1.0 / static_cast<double>(settings.size());
    for (const auto &s : settings) {
        const ComplexMatrix u = s.unitary();
        const auto probs = outcome_probabilities(rho, s);
        for (std::size_t x = 0; x < n; ++x) {
            std::vector<Complex> psi(n);
            for (std::size_t r = 0; r < n; ++r) psi[r] = std::conj(u(x, r));
            out += projector(psi) * Complex(weight * probs[x]);
        }
    }
    return out;
}

}  // namespace qcpd
