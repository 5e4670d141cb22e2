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
#include <sstream>

#include "qcpd/harness.hpp"

namespace qcpd {

namespace {

Complex normal_pair(Rng &rng) {
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
}

DensityMatrix random_state(int d, Rng &rng) {
    const std::size_t n = std::size_t{1} << d;
    ComplexMatrix g(n);
    for (auto &z : g.data()) z = normal_pair(rng);
    ComplexMatrix p = g * g.adjoint();
    p *= Complex(1.0 / p.trace().real());
    return DensityMatrix(0.5 * (p + p.adjoint()));
}

double max_diff(const ComplexMatrix &a, const ComplexMatrix &b) { return a.max_abs_diff(b); }

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ValidationCheck> out;

    for (int d = 1; d <= 2; ++d) {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = random_state(d, rng);
            const auto settings = enumerate_settings(Ensemble::local, d);
            ComplexMatrix acc(rho.dim());
            for (const auto &s : settings) {
                const auto p = outcome_probabilities(rho, s);
                for (Outcome x = 0; x < rho.dim(); ++x) {
                    acc += shadow_estimate(s, x).mat * Complex(p[x] / static_cast<double>(settings.size()));
                }
            }
            worst = std::max(worst, max_diff(acc, rho.mat()));
        }
        out.push_back({"local inverse channel d=" + std::to_string(d), worst <= 1e-10, "max error " + fmt(worst)});
    }

    {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = random_state(1, rng);
            ComplexMatrix expect = rho.mat() + ComplexMatrix::identity(2);
            expect *= Complex(1.0 / 3.0);
            worst = std::max(worst, max_diff(exact_channel_apply(rho, Ensemble::joint, 1), expect));
        }
        out.push_back({"joint channel is depolarizing at d=1", worst <= 1e-10, "max error " + fmt(worst)});
    }

    {
        bool ok = true;
        for (int d = 1; d <= 3; ++d) {
            const Observable o(kron_power(gates::X(), d));
            const auto a = estimator_bounds(o, Ensemble::local, BoundsMode::analytic, d);
            const auto e = estimator_bounds(o, Ensemble::local, BoundsMode::exhaustive, d);
            ok = ok && e.lower >= a.lower - 1e-12 && e.upper <= a.upper + 1e-12;
        }
        const Observable x(gates::X());
        const auto a = estimator_bounds(x, Ensemble::joint, BoundsMode::analytic, 1);
        const auto e = estimator_bounds(x, Ensemble::joint, BoundsMode::exhaustive, 1);
        ok = ok && e.lower >= a.lower - 1e-12 && e.upper <= a.upper + 1e-12;
        out.push_back({"exhaustive bounds inside analytic bounds", ok, ""});
    }

    {
        long bad = 0;
        for (long t = 1; t <= 10000; ++t) {
            const auto a = covering_intervals(t);
            const auto expected = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(t)))) + 1;
            if (a.size() != expected) ++bad;
            for (const auto &iv : a) bad += (iv.first <= t && t <= iv.last && iv.first >= 1) ? 0 : 1;
        }
        out.push_back({"covering interval count and membership", bad == 0, std::to_string(bad) + " violations"});
    }

    {
        double worst = 0.0;
        bool ordered = true;
        for (int k = 0; k < 200; ++k) {
            const int len = 1 + static_cast<int>(rng.below(12));
            std::vector<double> l(static_cast<std::size_t>(len));
            for (auto &v : l) v = 0.1 + 2.9 * rng.uniform();
            PerObservableState s;
            for (int t = 0; t < len; ++t) {
                s = cusum_update(sr_update(s, l[static_cast<std::size_t>(t)]), l[static_cast<std::size_t>(t)]);
                double sum = 0.0, best = 0.0;
                for (int j = 0; j <= t; ++j) {
                    double prod = 1.0;
                    for (int m = j; m <= t; ++m) prod *= l[static_cast<std::size_t>(m)];
                    sum += prod;
                    best = std::max(best, prod);
                }
                worst = std::max({worst, std::abs(s.sr() - sum) / sum, std::abs(s.cusum() - best) / best});
                ordered = ordered && s.cusum() <= s.sr() * (1 + 1e-12);
            }
        }
        out.push_back({"detector recursions match closed forms", worst <= 1e-9 && ordered,
                       "max relative error " + fmt(worst)});
    }
    return out;
}

}  // namespace qcpd
