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

#include "qcpd/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcpd {

namespace detail {

void check_qubits(int d, int max_d) {
    if (d < 1 || d > max_d) {
        throw std::invalid_argument("qubit count " + std::to_string(d) + " outside [1, " +
                                    std::to_string(max_d) + "]");
    }
}

void sanitize_probabilities(std::vector<double> &probs) {
    double sum = 0.0;
    for (double &p : probs) {
        if (!std::isfinite(p)) {
            throw std::domain_error("non-finite Born probability");
        }
        if (p < 0.0) {
            if (p < -1e-10) {
                throw std::domain_error("Born probability " + std::to_string(p) + " below -1e-10");
            }
            p = 0.0;
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        throw std::domain_error("Born probabilities sum to " + std::to_string(sum));
    }
    for (double &p : probs) {
        p /= sum;
    }
}

}  // namespace detail

namespace {

constexpr double kHermitianTol = 1e-10;

void require_same_dim(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

bool all_finite(const ComplexMatrix &m) {
    return std::all_of(m.data().begin(), m.data().end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Cholesky of (m + shift I); false when a pivot is not positive.
bool shifted_cholesky_ok(const ComplexMatrix &m, double shift) {
    const std::size_t n = m.dim();
    std::vector<Complex> l(n * n, Complex{});
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j).real() + shift;
        for (std::size_t k = 0; k < j; ++k) {
            diag -= std::norm(l[j * n + k]);
        }
        if (!(diag > 0.0)) {
            return false;
        }
        const double ljj = std::sqrt(diag);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l[i * n + k] * std::conj(l[j * n + k]);
            }
            l[i * n + j] = s / ljj;
        }
    }
    return true;
}

// Phase convention and degenerate-block ordering for Jacobi output.
void canonicalize(std::vector<double> &values, ComplexMatrix &vecs) {
    const std::size_t n = values.size();
    std::vector<std::vector<Complex>> cols(n, std::vector<Complex>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            cols[j][i] = vecs(i, j);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(cols[j][i]);
            if (mag > 1e-8) {
                const Complex phase = std::conj(cols[j][i]) / mag;
                for (auto &z : cols[j]) {
                    z *= phase;
                }
                cols[j][i] = mag;
                break;
            }
        }
    }

    auto rounded = [](double v) { return std::round(v * 1e8) / 1e8; };
    auto lex_less = [&](const std::vector<Complex> &a, const std::vector<Complex> &b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double ar = rounded(a[i].real()), br = rounded(b[i].real());
            if (ar != br) return ar < br;
            const double ai = rounded(a[i].imag()), bi = rounded(b[i].imag());
            if (ai != bi) return ai < bi;
        }
        return false;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    // Reorder inside blocks of (near-)equal eigenvalues.
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && values[order[end]] - values[order[start]] <= 1e-9) {
            ++end;
        }
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return lex_less(cols[a], cols[b]); });
        start = end;
    }

    std::vector<double> sorted_values(n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted_values[j] = values[order[j]];
        for (std::size_t i = 0; i < n; ++i) {
            vecs(i, j) = cols[order[j]][i];
        }
    }
    values = std::move(sorted_values);
}

std::vector<int> compute_support(const ComplexMatrix &m) {
    const std::size_t n = m.dim();
    const int d = m.num_qubits();
    std::vector<int> support;
    for (int k = 0; k < d; ++k) {
        const std::size_t bit = std::size_t{1} << (d - 1 - k);
        bool trivial = true;
        for (std::size_t r = 0; r < n && trivial; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                const bool rk = (r & bit) != 0, ck = (c & bit) != 0;
                if (rk != ck) {
                    if (std::abs(m(r, c)) > kHermitianTol) {
                        trivial = false;
                        break;
                    }
                } else if (rk && std::abs(m(r, c) - m(r ^ bit, c ^ bit)) > kHermitianTol) {
                    trivial = false;
                    break;
                }
            }
        }
        if (!trivial) {
            support.push_back(k);
        }
    }
    return support;
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Complex{}) {
    if (dim < 2 || !std::has_single_bit(dim) || dim > (std::size_t{1} << kMaxQubits)) {
        throw std::invalid_argument("matrix dimension " + std::to_string(dim) + " is not 2^d with 1 <= d <= " +
                                    std::to_string(kMaxQubits));
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : ComplexMatrix(rows.size()) {
    std::size_t r = 0;
    for (const auto &row : rows) {
        if (row.size() != dim_) {
            throw std::invalid_argument("ragged matrix literal");
        }
        std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
        ++r;
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

int ComplexMatrix::num_qubits() const { return dim_ == 0 ? 0 : std::countr_zero(dim_); }

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix &other) const {
    require_same_dim(dim_, other.dim_, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    }
    return worst;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = r; c < dim_; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool ComplexMatrix::is_unitary(double tol) const {
    if (dim_ == 0) return false;
    return (adjoint() * (*this)).max_abs_diff(identity(dim_)) <= tol;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &rhs) {
    require_same_dim(dim_, rhs.dim_, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &rhs) {
    require_same_dim(dim_, rhs.dim_, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex s) {
    for (auto &z : data_) z *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    require_same_dim(a.dim(), b.dim(), "operator*");
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix out(na * nb);
    for (std::size_t ar = 0; ar < na; ++ar)
        for (std::size_t ac = 0; ac < na; ++ac) {
            const Complex s = a(ar, ac);
            if (s == Complex{}) continue;
            for (std::size_t br = 0; br < nb; ++br)
                for (std::size_t bc = 0; bc < nb; ++bc) out(ar * nb + br, ac * nb + bc) = s * b(br, bc);
        }
    return out;
}

ComplexMatrix kron_power(const ComplexMatrix &a, int times) {
    if (times < 1) throw std::invalid_argument("kron_power needs at least one factor");
    ComplexMatrix out = a;
    for (int i = 1; i < times; ++i) out = kron(out, a);
    return out;
}

ComplexMatrix projector(std::span<const Complex> psi) {
    ComplexMatrix out(psi.size());
    for (std::size_t r = 0; r < psi.size(); ++r)
        for (std::size_t c = 0; c < psi.size(); ++c) out(r, c) = psi[r] * std::conj(psi[c]);
    return out;
}

namespace gates {
using namespace std::complex_literals;
ComplexMatrix I() { return {{1.0, 0.0}, {0.0, 1.0}}; }
ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix Y() { return {{0.0, -1i}, {1i, 0.0}}; }
ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix H() {
    const double h = 1.0 / std::sqrt(2.0);
    return {{h, h}, {h, -h}};
}
ComplexMatrix S() { return {{1.0, 0.0}, {0.0, 1i}}; }
}  // namespace gates

// ---------------------------------------------------------------------------
// Pauli expansion

ComplexMatrix pauli_matrix(std::span<const PauliOp> ops) {
    if (ops.empty()) throw std::invalid_argument("empty Pauli string");
    auto single = [](PauliOp p) {
        switch (p) {
            case PauliOp::I: return gates::I();
            case PauliOp::X: return gates::X();
            case PauliOp::Y: return gates::Y();
            case PauliOp::Z: return gates::Z();
        }
        return gates::I();
    };
    ComplexMatrix out = single(ops[0]);
    for (std::size_t k = 1; k < ops.size(); ++k) out = kron(out, single(ops[k]));
    return out;
}

std::vector<PauliTerm> pauli_decompose(const ComplexMatrix &m, double tol) {
    const int d = m.num_qubits();
    const std::size_t n = m.dim();
    const std::size_t num_strings = std::size_t{1} << (2 * d);
    std::vector<PauliTerm> terms;
    std::vector<PauliOp> ops(static_cast<std::size_t>(d));
    for (std::size_t code = 0; code < num_strings; ++code) {
        std::size_t xmask = 0;
        for (int k = 0; k < d; ++k) {
            ops[static_cast<std::size_t>(k)] = static_cast<PauliOp>((code >> (2 * (d - 1 - k))) & 3U);
            if (ops[static_cast<std::size_t>(k)] == PauliOp::X || ops[static_cast<std::size_t>(k)] == PauliOp::Y) {
                xmask |= std::size_t{1} << (d - 1 - k);
            }
        }
        // Tr(P M) = sum_r P[r, r^xmask] M[r^xmask, r].
        Complex acc{};
        for (std::size_t r = 0; r < n; ++r) {
            Complex p = 1.0;
            for (int k = 0; k < d; ++k) {
                const int rk = static_cast<int>((r >> (d - 1 - k)) & 1U);
                switch (ops[static_cast<std::size_t>(k)]) {
                    case PauliOp::I:
                    case PauliOp::X: break;
                    case PauliOp::Y: p *= rk == 0 ? Complex(0, -1) : Complex(0, 1); break;
                    case PauliOp::Z: p *= rk == 0 ? 1.0 : -1.0; break;
                }
            }
            acc += p * m(r ^ xmask, r);
        }
        const double c = acc.real() / static_cast<double>(n);
        if (std::abs(c) > tol) {
            terms.push_back({c, ops});
        }
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Eigensolver

EigenSystem hermitian_eig(const ComplexMatrix &m) {
    if (!m.is_hermitian(kHermitianTol) || !all_finite(m)) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    }
    const std::size_t n = m.dim();
    ComplexMatrix a = m;
    ComplexMatrix v = ComplexMatrix::identity(n);

    double frob = 0.0;
    for (Complex z : a.data()) frob += std::norm(z);
    const double stop = 1e-30 * std::max(frob, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double r = std::abs(b);
                if (r == 0.0 || r * r <= stop / static_cast<double>(n * n)) continue;

                // Phase-reduce to the real symmetric 2x2 [[app, r], [r, aqq]],
                // then a plane rotation. Combined G = diag(1, e^{-i phi}) R.
                const Complex e = b / r;  // e^{i phi}
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex em = std::conj(e);  // e^{-i phi}

                // A <- A G (columns p, q).
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * em * akq;
                    a(k, q) = s * akp + c * em * akq;
                }
                // A <- G^dag A (rows p, q).
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * e * aqk;
                    a(q, k) = s * apk + c * e * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * em * vkq;
                    v(k, q) = s * vkp + c * em * vkq;
                }
            }
        }
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
    canonicalize(values, v);
    return {std::move(values), std::move(v)};
}

// ---------------------------------------------------------------------------
// States and observables

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
    if (mat_.dim() == 0 || !all_finite(mat_)) {
        throw std::invalid_argument("density matrix has non-finite entries");
    }
    if (!mat_.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    const Complex tr = mat_.trace();
    if (std::abs(tr - 1.0) > 1e-10) {
        throw std::invalid_argument("density matrix trace is " + std::to_string(tr.real()));
    }
    if (!shifted_cholesky_ok(mat_, 1e-9)) {
        throw std::invalid_argument("density matrix has an eigenvalue below -1e-9");
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    detail::check_qubits(num_qubits);
    const std::size_t n = std::size_t{1} << num_qubits;
    return DensityMatrix(ComplexMatrix::identity(n) * Complex(1.0 / static_cast<double>(n)));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    double norm2 = 0.0;
    for (Complex z : psi) norm2 += std::norm(z);
    if (!(norm2 > 0.0)) throw std::invalid_argument("zero state vector");
    return DensityMatrix(projector(psi) * Complex(1.0 / norm2));
}

Observable::Observable(ComplexMatrix m) : mat_(std::move(m)) {
    if (mat_.dim() == 0 || !all_finite(mat_) || !mat_.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument("observable is not a finite Hermitian matrix");
    }
    eig_ = hermitian_eig(mat_);
    op_norm_ = std::max(std::abs(eig_.eigenvalues.front()), std::abs(eig_.eigenvalues.back()));
    trace_ = mat_.trace().real();
    support_ = compute_support(mat_);
    if (num_qubits() <= kPauliCacheQubits) {
        pauli_ = pauli_decompose(mat_);
    }
}

DensityMatrix make_theta_state(int d, double theta) {
    detail::check_qubits(d);
    if (!(std::abs(theta) <= 1.0)) {
        throw std::invalid_argument("theta must lie in [-1, 1]");
    }
    const std::size_t n = std::size_t{1} << d;
    const double scale = 1.0 / static_cast<double>(n);
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
        m(r, r) += scale;
        m(r, n - 1 - r) += theta * scale;  // X^{(x)d} is the anti-diagonal
    }
    return DensityMatrix(std::move(m));
}

Observable rotated_observable(int d, double gamma) {
    detail::check_qubits(d);
    using namespace std::complex_literals;
    const ComplexMatrix rz{{std::exp(-0.5i * gamma), 0.0}, {0.0, std::exp(0.5i * gamma)}};
    const ComplexMatrix single = rz.adjoint() * gates::X() * rz;
    return Observable(kron_power(single, d));
}

double expectation(const DensityMatrix &rho, const Observable &obs) {
    require_same_dim(rho.dim(), obs.dim(), "expectation");
    const std::size_t n = rho.dim();
    Complex acc{};
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) acc += rho.mat()(r, c) * obs.mat()(c, r);
    return acc.real();
}

std::vector<double> born_probabilities(const DensityMatrix &rho, const ComplexMatrix &unitary) {
    require_same_dim(rho.dim(), unitary.dim(), "born_probabilities");
    if (!unitary.is_unitary(1e-8)) {
        throw std::invalid_argument("measurement matrix is not unitary");
    }
    const std::size_t n = rho.dim();
    const ComplexMatrix w = unitary * rho.mat();
    std::vector<double> probs(n);
    for (std::size_t x = 0; x < n; ++x) {
        Complex acc{};
        for (std::size_t b = 0; b < n; ++b) acc += w(x, b) * std::conj(unitary(x, b));
        probs[x] = acc.real();
    }
    detail::sanitize_probabilities(probs);
    return probs;
}

std::size_t sample_index(std::span<const double> probs, Rng &rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cum += probs[i];
        last_positive = i;
        if (u < cum) return i;
    }
    return last_positive;
}

Outcome born_sample(const DensityMatrix &rho, const ComplexMatrix &unitary, Rng &rng) {
    const auto probs = born_probabilities(rho, unitary);
    return static_cast<Outcome>(sample_index(probs, rng));
}

}  // namespace qcpd
