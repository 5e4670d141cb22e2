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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qcpd/qcore.hpp"
#include "test_util.hpp"

using namespace qcpd;
using qcpd::testing::max_entry_diff;
using qcpd::testing::random_density;
using qcpd::testing::random_hermitian;
using qcpd::testing::trace_product;

namespace {

ComplexMatrix xpow(int d) { return kron_power(gates::X(), d); }

}  // namespace

TEST_CASE("matrix basics") {
    CHECK_THROWS_AS(ComplexMatrix(3), std::invalid_argument);
    const ComplexMatrix x = gates::X();
    CHECK(max_entry_diff(x * x, ComplexMatrix::identity(2)) < 1e-15);
    const ComplexMatrix xx = kron(x, x);
    CHECK(xx.dim() == 4);
    CHECK(xx(0, 3) == Complex(1.0));
    CHECK(xx(1, 2) == Complex(1.0));
    CHECK(gates::H().is_unitary(1e-12));
    CHECK_FALSE((gates::H() * Complex(2.0)).is_unitary(1e-8));
}

TEST_CASE("theta state") {
    const DensityMatrix mixed = make_theta_state(1, 0.0);
    CHECK(max_entry_diff(mixed.mat(), ComplexMatrix{{0.5, 0.0}, {0.0, 0.5}}) < 1e-15);

    const DensityMatrix plus = make_theta_state(1, 1.0);
    CHECK(max_entry_diff(plus.mat(), ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}) < 1e-15);

    const DensityMatrix s = make_theta_state(2, -0.5);
    CHECK(trace_product(s.mat(), xpow(2)).real() == doctest::Approx(-0.5).epsilon(1e-14));

    CHECK_THROWS_AS(make_theta_state(11, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_theta_state(1, 1.01), std::invalid_argument);

    for (int d = 1; d <= 4; ++d) {
        for (int k = 0; k <= 20; ++k) {
            const double theta = -1.0 + 0.1 * k;
            CHECK_NOTHROW(make_theta_state(d, std::clamp(theta, -1.0, 1.0)));
        }
    }
}

TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.0, 0.0}, {0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.5, 0.0}, {0.0, -0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 0.1}, {0.2, 0.5}}), std::invalid_argument);
    CHECK_NOTHROW(DensityMatrix(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}));
}

TEST_CASE("rotated observable") {
    const Observable o0 = rotated_observable(2, 0.0);
    CHECK(max_entry_diff(o0.mat(), xpow(2)) < 1e-15);

    const Observable o1 = rotated_observable(1, M_PI / 2);
    CHECK(std::abs(trace_product(gates::X(), o1.mat())) < 1e-14);
    CHECK(o1.op_norm() == doctest::Approx(1.0));
    CHECK(std::abs(o1.trace()) < 1e-14);

    // Brute force: R_z^dag X R_z built entry by entry.
    const double g = 0.37;
    const Complex e(std::cos(g), std::sin(g));
    const ComplexMatrix single{{0.0, e}, {std::conj(e), 0.0}};
    const Observable o2 = rotated_observable(2, g);
    CHECK(max_entry_diff(o2.mat(), kron(single, single)) < 1e-14);

    const DensityMatrix rho0 = make_theta_state(2, -0.5);
    CHECK(trace_product(rho0.mat(), rotated_observable(2, M_PI / 4).mat()).real() ==
          doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("expectation") {
    for (int d = 1; d <= 4; ++d) {
        const Observable x(xpow(d));
        CHECK(expectation(make_theta_state(d, 0.3), x) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(std::abs(expectation(DensityMatrix::maximally_mixed(d), rotated_observable(d, 0.4))) < 1e-14);
    }
    CHECK(expectation(make_theta_state(2, 0.5), rotated_observable(2, M_PI / 6)) ==
          doctest::Approx(0.375).epsilon(1e-12));
    CHECK_THROWS_AS(expectation(make_theta_state(1, 0.0), Observable(xpow(2))), std::invalid_argument);

    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 3;
        const DensityMatrix rho = random_density(d, rng);
        const ComplexMatrix a = random_hermitian(d, rng);
        const ComplexMatrix b = random_hermitian(d, rng);
        const double lhs = expectation(rho, Observable(a * Complex(0.7) + b * Complex(-1.3)));
        const double rhs = 0.7 * expectation(rho, Observable(a)) - 1.3 * expectation(rho, Observable(b));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("observable support and norms") {
    const Observable xi(kron(gates::X(), gates::I()));
    CHECK(xi.support() == std::vector<int>{0});
    const Observable iz(kron(gates::I(), gates::Z()));
    CHECK(iz.support() == std::vector<int>{1});
    const Observable xx(xpow(2));
    CHECK(xx.support() == std::vector<int>{0, 1});
    CHECK(xx.is_pauli_string());
    const Observable ii(ComplexMatrix::identity(4));
    CHECK(ii.support().empty());
    CHECK(ii.trace() == doctest::Approx(4.0));
    CHECK_THROWS_AS(Observable(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("pauli decomposition reconstructs") {
    Rng rng(11);
    for (int d = 1; d <= 3; ++d) {
        const ComplexMatrix h = random_hermitian(d, rng);
        ComplexMatrix sum(h.dim());
        for (const auto &term : pauli_decompose(h)) sum += pauli_matrix(term.ops) * Complex(term.coefficient);
        CHECK(max_entry_diff(sum, h) < 1e-12);
    }
}

TEST_CASE("hermitian eig") {
    const EigenSystem ex = hermitian_eig(gates::X());
    CHECK(ex.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(ex.eigenvalues[1] == doctest::Approx(1.0));
    // |-> and |+> up to phase.
    CHECK(std::abs(std::abs(ex.eigenvectors(0, 0)) - M_SQRT1_2) < 1e-12);
    CHECK(std::abs(ex.eigenvectors(0, 0) + ex.eigenvectors(1, 0)) < 1e-12);
    CHECK(std::abs(ex.eigenvectors(0, 1) - ex.eigenvectors(1, 1)) < 1e-12);

    for (double v : hermitian_eig(ComplexMatrix::identity(8)).eigenvalues) CHECK(v == doctest::Approx(1.0));

    const auto exx = hermitian_eig(xpow(2)).eigenvalues;
    REQUIRE(exx.size() == 4);
    CHECK(exx[0] == doctest::Approx(-1.0));
    CHECK(exx[1] == doctest::Approx(-1.0));
    CHECK(exx[2] == doctest::Approx(1.0));
    CHECK(exx[3] == doctest::Approx(1.0));

    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);

    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 4;
        const ComplexMatrix h = random_hermitian(d, rng);
        const EigenSystem es = hermitian_eig(h);
        const std::size_t n = h.dim();
        ComplexMatrix lam(n);
        for (std::size_t i = 0; i < n; ++i) lam(i, i) = es.eigenvalues[i];
        const ComplexMatrix &v = es.eigenvectors;
        CHECK(max_entry_diff(v * lam * v.adjoint(), h) <= 1e-8);
        CHECK(max_entry_diff(v.adjoint() * v, ComplexMatrix::identity(n)) <= 1e-8);
        for (std::size_t i = 1; i < n; ++i) CHECK(es.eigenvalues[i - 1] <= es.eigenvalues[i]);
        const EigenSystem again = hermitian_eig(h);
        CHECK(max_entry_diff(again.eigenvectors, v) == 0.0);
    }
}

TEST_CASE("born sampling") {
    Rng rng(5);
    const DensityMatrix zero = DensityMatrix::pure(std::vector<Complex>{1.0, 0.0});
    for (int i = 0; i < 100; ++i) CHECK(born_sample(zero, gates::I(), rng) == 0U);

    const auto pm = born_probabilities(make_theta_state(1, 0.0), gates::H());
    CHECK(pm[0] == doctest::Approx(0.5));
    CHECK(pm[1] == doctest::Approx(0.5));

    const double theta = 0.42;
    const auto pt = born_probabilities(make_theta_state(1, theta), gates::H());
    CHECK(pt[0] == doctest::Approx((1 + theta) / 2).epsilon(1e-13));

    CHECK_THROWS_AS(born_probabilities(zero, gates::H() * Complex(2.0)), std::invalid_argument);

    const DensityMatrix rho = random_density(2, rng);
    const ComplexMatrix u = kron(gates::H(), gates::S());
    const auto probs = born_probabilities(rho, u);
    // Oracle: <x|U rho U^dag|x> from explicit products.
    const ComplexMatrix conj = u * rho.mat() * u.adjoint();
    for (std::size_t x = 0; x < 4; ++x) CHECK(probs[x] == doctest::Approx(conj(x, x).real()).epsilon(1e-12));

    const int n = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) ++counts[born_sample(rho, u, rng)];
    for (std::size_t x = 0; x < 4; ++x) {
        CHECK(std::abs(counts[x] / double(n) - probs[x]) < 4.0 / std::sqrt(double(n)));
    }
}

TEST_CASE("probability sanitation") {
    std::vector<double> p{0.5, 0.5 + 1e-11, -5e-11};
    detail::sanitize_probabilities(p);
    CHECK(p[2] == 0.0);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> bad{1.1, -0.1};
    CHECK_THROWS(detail::sanitize_probabilities(bad));
}
