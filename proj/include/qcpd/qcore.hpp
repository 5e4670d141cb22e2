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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "qcpd/rng.hpp"

namespace qcpd {

using Complex = std::complex<double>;

/// Largest qubit count accepted by the dense representation.
inline constexpr int kMaxQubits = 10;

/// Computational-basis outcome. Qubit k is bit (d - 1 - k) of the index, so
/// qubit 0 is the leftmost tensor factor.
using Outcome = std::uint32_t;

inline int outcome_bit(Outcome x, int qubit, int d) { return static_cast<int>((x >> (d - 1 - qubit)) & 1U); }

/// Dense square complex matrix whose dimension is a power of two (row-major).
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    int num_qubits() const;

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    std::span<const Complex> data() const { return data_; }
    std::span<Complex> data() { return data_; }

    ComplexMatrix adjoint() const;
    Complex trace() const;

    /// Largest entrywise modulus of (*this - other).
    double max_abs_diff(const ComplexMatrix &other) const;
    bool is_hermitian(double tol) const;
    bool is_unitary(double tol) const;

    ComplexMatrix &operator+=(const ComplexMatrix &rhs);
    ComplexMatrix &operator-=(const ComplexMatrix &rhs);
    ComplexMatrix &operator*=(Complex s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);
ComplexMatrix kron_power(const ComplexMatrix &a, int times);

/// Outer product |psi><psi|.
ComplexMatrix projector(std::span<const Complex> psi);

namespace gates {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
ComplexMatrix H();
ComplexMatrix S();
}  // namespace gates

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// One term c * P_0 (x) ... (x) P_{d-1} of a Pauli expansion.
struct PauliTerm {
    double coefficient = 0.0;
    std::vector<PauliOp> ops;
};

/// Dense matrix of a Pauli string.
ComplexMatrix pauli_matrix(std::span<const PauliOp> ops);

/// Pauli expansion of a Hermitian matrix; coefficients below `tol` dropped.
std::vector<PauliTerm> pauli_decompose(const ComplexMatrix &m, double tol = 1e-12);

struct EigenSystem {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // column j pairs with eigenvalues[j]
};

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each eigenvector is phase-fixed so its first entry above 1e-8 in modulus is
/// real and positive. Within a block of eigenvalues equal to 1e-9, columns are
/// ordered lexicographically by their entries rounded to 1e-8. Throws
/// std::invalid_argument if the input is not Hermitian within 1e-10.
EigenSystem hermitian_eig(const ComplexMatrix &m);

/// Unit-trace, Hermitian, positive semidefinite matrix.
class DensityMatrix {
  public:
    /// Validates the density-matrix invariants; throws std::invalid_argument.
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix maximally_mixed(int num_qubits);
    static DensityMatrix pure(std::span<const Complex> psi);

    const ComplexMatrix &mat() const { return mat_; }
    std::size_t dim() const { return mat_.dim(); }
    int num_qubits() const { return mat_.num_qubits(); }

  private:
    ComplexMatrix mat_;
};

/// Hermitian operator with cached spectral data.
class Observable {
  public:
    /// Throws std::invalid_argument if `m` is not Hermitian within 1e-10.
    explicit Observable(ComplexMatrix m);

    const ComplexMatrix &mat() const { return mat_; }
    std::size_t dim() const { return mat_.dim(); }
    int num_qubits() const { return mat_.num_qubits(); }

    /// Qubits on which the operator acts non-trivially, ascending.
    const std::vector<int> &support() const { return support_; }
    double op_norm() const { return op_norm_; }
    double trace() const { return trace_; }
    double lambda_min() const { return eig_.eigenvalues.front(); }
    double lambda_max() const { return eig_.eigenvalues.back(); }
    const EigenSystem &eigensystem() const { return eig_; }

    /// Pauli expansion, cached for up to kPauliCacheQubits qubits.
    const std::optional<std::vector<PauliTerm>> &pauli_terms() const { return pauli_; }

    /// True when the operator is a single real multiple of a Pauli string.
    bool is_pauli_string() const { return pauli_ && pauli_->size() == 1; }

    static constexpr int kPauliCacheQubits = 4;

  private:
    ComplexMatrix mat_;
    std::vector<int> support_;
    double op_norm_ = 0.0;
    double trace_ = 0.0;
    EigenSystem eig_;
    std::optional<std::vector<PauliTerm>> pauli_;
};

/// (I + theta X^{(x)d}) / 2^d.
DensityMatrix make_theta_state(int d, double theta);

/// (Rz(gamma)^dag X Rz(gamma))^{(x)d} with Rz(gamma) = exp(-i gamma Z / 2).
Observable rotated_observable(int d, double gamma);

/// Tr(rho O). Throws std::invalid_argument on dimension mismatch.
double expectation(const DensityMatrix &rho, const Observable &obs);

/// Outcome distribution <x|U rho U^dag|x>. Entries in [-1e-10, 0) are clamped
/// to zero and the vector renormalized; larger negativity throws
/// std::domain_error. Throws std::invalid_argument if U is not unitary.
std::vector<double> born_probabilities(const DensityMatrix &rho, const ComplexMatrix &unitary);

/// Draws one computational-basis outcome of U rho U^dag.
Outcome born_sample(const DensityMatrix &rho, const ComplexMatrix &unitary, Rng &rng);

/// Inverse-CDF draw from a normalized probability vector.
std::size_t sample_index(std::span<const double> probs, Rng &rng);

namespace detail {
/// Clamp-and-renormalize step shared by every Born-rule routine.
void sanitize_probabilities(std::vector<double> &probs);
void check_qubits(int d, int max_d = kMaxQubits);
}  // namespace detail

}  // namespace qcpd
