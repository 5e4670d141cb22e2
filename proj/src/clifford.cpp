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

#include "qcpd/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcpd {

namespace {

using BitMat = std::vector<std::vector<std::uint8_t>>;

BitMat zeros(std::size_t rows, std::size_t cols) { return BitMat(rows, std::vector<std::uint8_t>(cols, 0)); }

BitMat identity_bits(std::size_t n) {
    BitMat m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

BitMat mul(const BitMat &a, const BitMat &b) {
    const std::size_t n = a.size(), k = b.size(), m = b.front().size();
    BitMat out = zeros(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (a[i][j])
                for (std::size_t c = 0; c < m; ++c) out[i][c] ^= b[j][c];
    return out;
}

// Unit lower-triangular inverse by forward substitution.
BitMat inverse_lower(const BitMat &l) {
    const std::size_t n = l.size();
    BitMat inv = identity_bits(n);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < row; ++col)
            if (l[row][col])
                for (std::size_t c = 0; c < n; ++c) inv[row][c] ^= inv[col][c];
    return inv;
}

BitMat transpose(const BitMat &a) {
    BitMat t = zeros(a.front().size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

BitMat from_quadrants(const BitMat &ul, const BitMat &ur, const BitMat &ll, const BitMat &lr) {
    const std::size_t n = ul.size();
    BitMat out = zeros(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out[i][j] = ul[i][j];
            out[i][j + n] = ur[i][j];
            out[i + n][j] = ll[i][j];
            out[i + n][j + n] = lr[i][j];
        }
    return out;
}

// Quantum Mallows sample: Hadamard flags and a permutation.
void sample_qmallows(std::size_t n, Rng &rng, std::vector<std::uint8_t> &hada, std::vector<std::size_t> &perm) {
    std::vector<std::size_t> remaining(n);
    for (std::size_t k = 0; k < n; ++k) remaining[k] = k;
    hada.clear();
    perm.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = remaining.size();
        const double u = rng.uniform();
        const double eps = std::pow(4.0, -static_cast<double>(m));
        auto k = static_cast<std::size_t>(-std::ceil(std::log2(u + (1.0 - u) * eps)));
        k = std::min(k, 2 * m - 1);
        hada.push_back(k < m ? 1 : 0);
        if (k >= m) k = 2 * m - k - 1;
        perm.push_back(remaining[k]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
    }
}

int symplectic_form(const SignedPauli &a, const SignedPauli &b) {
    int acc = 0;
    for (std::size_t k = 0; k < a.xs.size(); ++k) acc ^= (a.xs[k] & b.zs[k]) ^ (a.zs[k] & b.xs[k]);
    return acc;
}

// In-place P|psi> for a signed Pauli.
void apply_pauli(const SignedPauli &p, std::vector<Complex> &psi, std::vector<Complex> &scratch) {
    const int n = static_cast<int>(p.xs.size());
    const std::size_t dim = psi.size();
    std::size_t xmask = 0;
    for (int q = 0; q < n; ++q)
        if (p.xs[static_cast<std::size_t>(q)]) xmask |= std::size_t{1} << (n - 1 - q);
    scratch.assign(dim, Complex{});
    for (std::size_t k = 0; k < dim; ++k) {
        if (psi[k] == Complex{}) continue;
        Complex phase = p.sign ? -1.0 : 1.0;
        for (int q = 0; q < n; ++q) {
            const bool bit = ((k >> (n - 1 - q)) & 1U) != 0;
            const bool x = p.xs[static_cast<std::size_t>(q)] != 0, z = p.zs[static_cast<std::size_t>(q)] != 0;
            if (z && bit) phase = -phase;
            if (x && z) phase *= Complex(0.0, 1.0);
        }
        scratch[k ^ xmask] += phase * psi[k];
    }
    psi.swap(scratch);
}

}  // namespace

bool CliffordTableau::is_symplectic() const {
    const auto n = static_cast<std::size_t>(num_qubits);
    if (x_images.size() != n || z_images.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (symplectic_form(x_images[i], x_images[j]) != 0) return false;
            if (symplectic_form(z_images[i], z_images[j]) != 0) return false;
            if (symplectic_form(x_images[i], z_images[j]) != (i == j ? 1 : 0)) return false;
        }
    return true;
}

CliffordTableau random_clifford_tableau(int num_qubits, Rng &rng) {
    detail::check_qubits(num_qubits);
    const auto n = static_cast<std::size_t>(num_qubits);

    std::vector<std::uint8_t> hada;
    std::vector<std::size_t> perm;
    sample_qmallows(n, rng, hada, perm);

    BitMat symmetric = zeros(n, n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col <= row; ++col) symmetric[row][col] = rng.coin() ? 1 : 0;
        for (std::size_t col = 0; col < row; ++col) symmetric[col][row] = symmetric[row][col];
    }

    BitMat symmetric_m = zeros(n, n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col <= row; ++col) symmetric_m[row][col] = rng.coin() ? 1 : 0;
        symmetric_m[row][row] &= hada[row];
        for (std::size_t col = 0; col < row; ++col) {
            bool b = hada[row] && hada[col];
            b |= hada[row] > hada[col] && perm[row] < perm[col];
            b |= hada[row] < hada[col] && perm[row] > perm[col];
            symmetric_m[row][col] &= b ? 1 : 0;
            symmetric_m[col][row] = symmetric_m[row][col];
        }
    }

    BitMat lower = identity_bits(n);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < row; ++col) lower[row][col] = rng.coin() ? 1 : 0;

    BitMat lower_m = identity_bits(n);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < row; ++col) {
            lower_m[row][col] = rng.coin() ? 1 : 0;
            bool b = hada[row] < hada[col];
            b |= hada[row] && hada[col] && perm[row] > perm[col];
            b |= !hada[row] && !hada[col] && perm[row] < perm[col];
            lower_m[row][col] &= b ? 1 : 0;
        }

    const BitMat prod = mul(symmetric, lower);
    const BitMat prod_m = mul(symmetric_m, lower_m);
    const BitMat inv = transpose(inverse_lower(lower));
    const BitMat inv_m = transpose(inverse_lower(lower_m));

    const BitMat fused = from_quadrants(lower, zeros(n, n), prod, inv);
    const BitMat fused_m = from_quadrants(lower_m, zeros(n, n), prod_m, inv_m);

    BitMat u = zeros(2 * n, 2 * n);
    for (std::size_t row = 0; row < n; ++row) {
        u[row] = fused[perm[row]];
        u[row + n] = fused[perm[row] + n];
    }
    for (std::size_t row = 0; row < n; ++row)
        if (hada[row]) std::swap(u[row], u[row + n]);

    const BitMat raw = mul(fused_m, u);

    CliffordTableau t;
    t.num_qubits = num_qubits;
    t.x_images.resize(n);
    t.z_images.resize(n);
    for (std::size_t row = 0; row < n; ++row) {
        auto &xi = t.x_images[row];
        auto &zi = t.z_images[row];
        xi.xs.assign(raw[row].begin(), raw[row].begin() + static_cast<std::ptrdiff_t>(n));
        xi.zs.assign(raw[row].begin() + static_cast<std::ptrdiff_t>(n), raw[row].end());
        zi.xs.assign(raw[row + n].begin(), raw[row + n].begin() + static_cast<std::ptrdiff_t>(n));
        zi.zs.assign(raw[row + n].begin() + static_cast<std::ptrdiff_t>(n), raw[row + n].end());
    }
    for (auto &p : t.x_images) p.sign = rng.coin();
    for (auto &p : t.z_images) p.sign = rng.coin();
    return t;
}

std::vector<CliffordTableau> all_single_qubit_cliffords() {
    // Nonzero vectors of GF(2)^2 as (x, z): X, Z, Y. Any two distinct ones
    // anticommute, so every ordered distinct pair is a valid (X, Z) image.
    const std::uint8_t vecs[3][2] = {{1, 0}, {0, 1}, {1, 1}};
    std::vector<CliffordTableau> out;
    for (const auto &xv : vecs)
        for (const auto &zv : vecs) {
            if (xv[0] == zv[0] && xv[1] == zv[1]) continue;
            for (int signs = 0; signs < 4; ++signs) {
                CliffordTableau t;
                t.num_qubits = 1;
                t.x_images.push_back({{xv[0]}, {xv[1]}, (signs & 1) != 0});
                t.z_images.push_back({{zv[0]}, {zv[1]}, (signs & 2) != 0});
                out.push_back(std::move(t));
            }
        }
    return out;
}

ComplexMatrix signed_pauli_matrix(const SignedPauli &p) {
    std::vector<PauliOp> ops(p.xs.size());
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (p.xs[k] && p.zs[k]) ops[k] = PauliOp::Y;
        else if (p.xs[k]) ops[k] = PauliOp::X;
        else if (p.zs[k]) ops[k] = PauliOp::Z;
        else ops[k] = PauliOp::I;
    }
    ComplexMatrix m = pauli_matrix(ops);
    if (p.sign) m *= -1.0;
    return m;
}

ComplexMatrix tableau_to_unitary(const CliffordTableau &tableau) {
    if (!tableau.is_symplectic()) {
        throw std::invalid_argument("tableau does not define a Clifford");
    }
    const int n = tableau.num_qubits;
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> psi(dim), scratch(dim), tmp(dim);

    // C|0>: project a basis vector onto the joint +1 eigenspace of the Z images.
    bool found = false;
    for (std::size_t k = 0; k < dim && !found; ++k) {
        std::fill(psi.begin(), psi.end(), Complex{});
        psi[k] = 1.0;
        for (const auto &g : tableau.z_images) {
            tmp = psi;
            apply_pauli(g, tmp, scratch);
            for (std::size_t i = 0; i < dim; ++i) psi[i] = 0.5 * (psi[i] + tmp[i]);
        }
        double norm2 = 0.0;
        for (Complex z : psi) norm2 += std::norm(z);
        if (norm2 > 0.5 / static_cast<double>(dim)) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto &z : psi) z *= inv;
            found = true;
        }
    }
    if (!found) {
        throw std::logic_error("stabilizer projection vanished");
    }

    double best = 0.0;
    for (Complex z : psi) best = std::max(best, std::abs(z));
    for (Complex z : psi) {
        if (std::abs(z) >= best - 1e-12) {
            const Complex phase = std::conj(z) / std::abs(z);
            for (auto &w : psi) w *= phase;
            break;
        }
    }

    ComplexMatrix c(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        tmp = psi;
        for (int j = 0; j < n; ++j)
            if ((x >> (n - 1 - j)) & 1U) apply_pauli(tableau.x_images[static_cast<std::size_t>(j)], tmp, scratch);
        for (std::size_t r = 0; r < dim; ++r) c(r, x) = tmp[r];
    }
    return c;
}

}  // namespace qcpd
