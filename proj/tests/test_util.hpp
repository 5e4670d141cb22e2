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

#include <cmath>
#include <complex>
#include <vector>

#include "qcpd/qcore.hpp"
#include "qcpd/rng.hpp"

namespace qcpd::testing {

inline Complex gaussian_complex(Rng &rng) {
    // Box-Muller; only used to build test matrices.
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
}

inline ComplexMatrix random_hermitian(int d, Rng &rng) {
    const std::size_t n = std::size_t{1} << d;
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
        m(r, r) = gaussian_complex(rng).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            m(r, c) = gaussian_complex(rng);
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

// Ginibre construction G G^dag / Tr.
inline DensityMatrix random_density(int d, Rng &rng) {
    const std::size_t n = std::size_t{1} << d;
    ComplexMatrix g(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) g(r, c) = gaussian_complex(rng);
    ComplexMatrix p = g * g.adjoint();
    p *= Complex(1.0 / p.trace().real());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c) {
            const Complex avg = 0.5 * (p(r, c) + std::conj(p(c, r)));
            p(r, c) = avg;
            p(c, r) = std::conj(avg);
        }
        p(r, r) = p(r, r).real();
    }
    return DensityMatrix(p);
}

// Naive Tr(A B), independent of library helpers.
inline Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    Complex acc{};
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) acc += a(r, c) * b(c, r);
    return acc;
}

inline double max_entry_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    double m = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

}  // namespace qcpd::testing
