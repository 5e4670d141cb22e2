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

#include <map>
#include <set>

#include "doctest.h"
#include "qcpd/clifford.hpp"
#include "test_util.hpp"

using namespace qcpd;
using qcpd::testing::max_entry_diff;

namespace {

ComplexMatrix pauli_on(int d, int k, const ComplexMatrix &p) {
    ComplexMatrix out = k == 0 ? p : gates::I();
    for (int q = 1; q < d; ++q) out = kron(out, q == k ? p : gates::I());
    return out;
}

// Canonical key of a unitary modulo global phase.
std::vector<long> phase_free_key(const ComplexMatrix &u) {
    Complex ref{};
    for (std::size_t i = 0; i < u.dim() * u.dim(); ++i) {
        if (std::abs(u.data()[i]) > 1e-6) {
            ref = u.data()[i] / std::abs(u.data()[i]);
            break;
        }
    }
    std::vector<long> key;
    for (auto z : u.data()) {
        const Complex w = z / ref;
        key.push_back(std::lround(w.real() * 1e6));
        key.push_back(std::lround(w.imag() * 1e6));
    }
    return key;
}

}  // namespace

TEST_CASE("single-qubit group has 24 distinct elements") {
    const auto all = all_single_qubit_cliffords();
    REQUIRE(all.size() == 24);
    std::set<std::vector<long>> keys;
    for (const auto &t : all) {
        CHECK(t.is_symplectic());
        const ComplexMatrix c = tableau_to_unitary(t);
        CHECK(c.is_unitary(1e-12));
        keys.insert(phase_free_key(c));
    }
    CHECK(keys.size() == 24);
}

TEST_CASE("lifted unitary conjugates Paulis to the tableau images") {
    Rng rng(99);
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 20; ++trial) {
            const CliffordTableau t = random_clifford_tableau(d, rng);
            REQUIRE(t.is_symplectic());
            const ComplexMatrix c = tableau_to_unitary(t);
            REQUIRE(c.is_unitary(1e-10));
            for (int k = 0; k < d; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                CHECK(max_entry_diff(c * pauli_on(d, k, gates::X()) * c.adjoint(),
                                     signed_pauli_matrix(t.x_images[ku])) < 1e-10);
                CHECK(max_entry_diff(c * pauli_on(d, k, gates::Z()) * c.adjoint(),
                                     signed_pauli_matrix(t.z_images[ku])) < 1e-10);
            }
        }
    }
}

TEST_CASE("random single-qubit Cliffords are uniform over the 24") {
    const auto all = all_single_qubit_cliffords();
    std::map<std::vector<long>, int> index;
    for (std::size_t i = 0; i < all.size(); ++i) index[phase_free_key(tableau_to_unitary(all[i]))] = int(i);
    Rng rng(1234);
    const int n = 48000;
    std::vector<int> counts(24, 0);
    for (int i = 0; i < n; ++i) {
        const auto key = phase_free_key(tableau_to_unitary(random_clifford_tableau(1, rng)));
        auto it = index.find(key);
        REQUIRE(it != index.end());
        ++counts[static_cast<std::size_t>(it->second)];
    }
    // Chi-square with 23 dof; 0.999 quantile is about 49.7.
    double chi2 = 0.0;
    const double expected = n / 24.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 49.7);
}

TEST_CASE("two-qubit symplectic part covers the group") {
    // |Sp(4,2)| = 720; with 20000 draws every element appears w.h.p.
    Rng rng(77);
    std::set<std::vector<std::uint8_t>> seen;
    for (int i = 0; i < 20000; ++i) {
        const auto t = random_clifford_tableau(2, rng);
        std::vector<std::uint8_t> key;
        for (const auto *imgs : {&t.x_images, &t.z_images})
            for (const auto &p : *imgs) {
                key.insert(key.end(), p.xs.begin(), p.xs.end());
                key.insert(key.end(), p.zs.begin(), p.zs.end());
            }
        seen.insert(key);
    }
    CHECK(seen.size() == 720);
}

TEST_CASE("signed pauli matrix") {
    SignedPauli y{{1}, {1}, false};
    CHECK(max_entry_diff(signed_pauli_matrix(y), gates::Y()) < 1e-15);
    SignedPauli mz{{0}, {1}, true};
    CHECK(max_entry_diff(signed_pauli_matrix(mz), gates::Z() * Complex(-1.0)) < 1e-15);
}
