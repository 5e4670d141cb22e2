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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qcpd/edetect.hpp"
#include "qcpd/rng.hpp"

using namespace qcpd;

namespace {

double sum_of_products(const std::vector<double> &l) {
    double s = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j) {
        double p = 1.0;
        for (std::size_t k = j; k < l.size(); ++k) p *= l[k];
        s += p;
    }
    return s;
}

double max_of_products(const std::vector<double> &l) {
    double m = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j) {
        double p = 1.0;
        for (std::size_t k = j; k < l.size(); ++k) p *= l[k];
        m = std::max(m, p);
    }
    return m;
}

}  // namespace

TEST_CASE("baseline increment") {
    CHECK(baseline_increment(0.0, 123.0) == 1.0);
    CHECK(baseline_increment(0.3, 3.0) == doctest::Approx(1.9));
    CHECK(baseline_increment(0.3, -3.0) == doctest::Approx(0.1));
    CHECK(baseline_increment(0.3, -3.0, -3.0, 3.0) == doctest::Approx(0.1));
    CHECK_THROWS_AS(baseline_increment(0.34, -3.0, -3.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(baseline_increment(-0.34, 1.0, -3.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(baseline_increment(0.1, 3.5, -3.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(baseline_increment(0.5, -2.0), std::invalid_argument);
}

TEST_CASE("SR recursion examples") {
    PerObservableState s;
    const double expect[] = {2.0, 1.5, 7.5};
    const double l[] = {2.0, 0.5, 3.0};
    for (int t = 0; t < 3; ++t) {
        s = sr_update(s, l[t]);
        CHECK(s.sr() == doctest::Approx(expect[t]));
    }
    PerObservableState n;
    for (int t = 1; t <= 25; ++t) n = sr_update(n, 1.0);
    CHECK(n.sr() == 25.0);
    CHECK(sr_update(PerObservableState{}, 0.7).sr() == doctest::Approx(0.7));
    CHECK_THROWS_AS(sr_update(PerObservableState{}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sr_update(PerObservableState{}, -1.0), std::invalid_argument);
}

TEST_CASE("CUSUM recursion examples") {
    PerObservableState s;
    const double expect[] = {2.0, 1.0, 3.0};
    const double l[] = {2.0, 0.5, 3.0};
    for (int t = 0; t < 3; ++t) {
        s = cusum_update(s, l[t]);
        CHECK(s.cusum() == doctest::Approx(expect[t]));
    }
    PerObservableState ones;
    for (int t = 0; t < 5; ++t) {
        ones = cusum_update(ones, 1.0);
        CHECK(ones.cusum() == 1.0);
    }
    PerObservableState half = cusum_update(PerObservableState{}, 0.5);
    CHECK(half.cusum() == 0.5);
    half = cusum_update(half, 0.5);
    CHECK(half.cusum() == 0.5);
    CHECK_THROWS_AS(cusum_update(PerObservableState{}, 0.0), std::invalid_argument);
}

TEST_CASE("recursions equal closed forms on random sequences") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.below(12);
        std::vector<double> l;
        PerObservableState s;
        for (std::size_t t = 0; t < len; ++t) {
            l.push_back(0.05 + 3.0 * rng.uniform());
            s = cusum_update(sr_update(s, l.back()), l.back());
            const double sr = sum_of_products(l), cu = max_of_products(l);
            CHECK(std::abs(s.sr() - sr) <= 1e-9 * sr);
            CHECK(std::abs(s.cusum() - cu) <= 1e-9 * cu);
            CHECK(s.cusum() <= s.sr() * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("log offset keeps huge statistics consistent") {
    PerObservableState s;
    double log_expected = 0.0;
    for (int t = 0; t < 2000; ++t) {
        s = cusum_update(sr_update(s, 2.0), 2.0);
        log_expected += std::log(2.0);
    }
    CHECK(s.m_sr <= PerObservableState::kPromoteAbove);
    CHECK(s.log_offset_sr > 0.0);
    // SR = 2 + 4 + ... + 2^t, so log SR = t log 2 + log 2 up to 2^-t.
    CHECK(s.log_sr() == doctest::Approx(log_expected + std::log(2.0)).epsilon(1e-12));
    CHECK(s.log_cusum() == doctest::Approx(log_expected).epsilon(1e-12));
    CHECK(std::isinf(s.sr()));

    // Falling back below the promotion level restores linear scale.
    for (int t = 0; t < 2100; ++t) s = sr_update(s, 0.5);
    CHECK(s.log_offset_sr == 0.0);
    CHECK(std::isfinite(s.sr()));
    CHECK(s.sr() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mixture") {
    DetectorConfig c{{0.5, 0.5}, 0.1, DetectorKind::sr, std::nullopt};
    std::vector<PerObservableState> m(2);
    m[0].m_sr = 2;
    m[1].m_sr = 4;
    CHECK(mixture_statistic(c, m) == 3.0);
    DetectorConfig one{{1.0}, 0.1, DetectorKind::sr, std::nullopt};
    std::vector<PerObservableState> single(1);
    single[0].m_sr = 7.25;
    CHECK(mixture_statistic(one, single) == 7.25);
    DetectorConfig three{{0.2, 0.3, 0.5}, 0.1, DetectorKind::cusum, std::nullopt};
    std::vector<PerObservableState> ones(3);
    for (auto &s : ones) s.m_cu = 1.0;
    CHECK(mixture_statistic(three, ones) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mixture_statistic(three, m), std::invalid_argument);

    // Permuting (observable, weight) pairs leaves M unchanged.
    DetectorConfig rev{{0.5, 0.3, 0.2}, 0.1, DetectorKind::cusum, std::nullopt};
    std::vector<PerObservableState> a(3);
    a[0].m_cu = 1.5;
    a[1].m_cu = 2.5;
    a[2].m_cu = 9.0;
    std::vector<PerObservableState> b{a[2], a[1], a[0]};
    CHECK(mixture_statistic(three, a) == doctest::Approx(mixture_statistic(rev, b)));
    CHECK(log_mixture_statistic(three, a) == doctest::Approx(std::log(mixture_statistic(three, a))));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((DetectorConfig{{0.5, 0.6}, 0.1, DetectorKind::sr, std::nullopt}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorConfig{{1.0, 0.0}, 0.1, DetectorKind::sr, std::nullopt}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorConfig{{1.0}, 1.0, DetectorKind::sr, std::nullopt}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorConfig{{}, 0.5, DetectorKind::sr, std::nullopt}.validate()), std::invalid_argument);
    CHECK(DetectorConfig{{1.0}, 0.25, DetectorKind::cusum, std::nullopt}.threshold() == 4.0);
    CHECK(DetectorConfig{{1.0}, 0.25, DetectorKind::cusum, 7.0}.threshold() == 7.0);
}

TEST_CASE("step and decide") {
    EDetector sr(DetectorConfig::uniform(1, 0.5, DetectorKind::sr));
    const std::vector<double> one{1.0};
    CHECK(sr.step(one).decision == Decision::proceed);
    const auto &out = sr.step(one);
    CHECK(out.decision == Decision::stop);
    CHECK(out.mixture == 2.0);
    CHECK(sr.time() == 2);
    CHECK_THROWS_AS(sr.step(one), std::logic_error);

    EDetector cu(DetectorConfig::uniform(1, 0.5, DetectorKind::cusum));
    for (int t = 0; t < 1000; ++t) CHECK(cu.step(one).decision == Decision::proceed);
    CHECK(cu.last().mixture == 1.0);

    // Exact boundary stops.
    EDetector b(DetectorConfig::uniform(1, 0.25, DetectorKind::sr));
    const std::vector<double> four{4.0};
    CHECK(b.step(four).decision == Decision::stop);

    EDetector two(DetectorConfig::uniform(2, 0.01, DetectorKind::sr));
    CHECK_THROWS_AS(two.step(one), std::invalid_argument);

    // Functional form agrees with the class.
    DetectorConfig cfg = DetectorConfig::uniform(1, 0.5, DetectorKind::sr);
    std::vector<PerObservableState> st(1);
    bool stopped = false;
    CHECK(step_and_decide(cfg, st, one, stopped).decision == Decision::proceed);
    CHECK(step_and_decide(cfg, st, one, stopped).decision == Decision::stop);
    CHECK_THROWS_AS(step_and_decide(cfg, st, one, stopped), std::logic_error);
}

TEST_CASE("selected steps leave other observables unchanged") {
    EDetector det(DetectorConfig::uniform(3, 1e-6, DetectorKind::sr));
    for (long t = 1; t <= 30; ++t) det.step_selected(static_cast<std::size_t>((t - 1) % 3), 1.1);
    const auto s = det.states();
    // Each got exactly 10 updates of 1.1.
    PerObservableState ref;
    for (int k = 0; k < 10; ++k) ref = sr_update(ref, 1.1);
    for (const auto &st : s) CHECK(st.sr() == doctest::Approx(ref.sr()));
    const auto before = det.states()[2];
    det.step_selected(0, 1.5);
    CHECK(det.states()[2].m_sr == before.m_sr);
    CHECK_THROWS_AS(det.step_selected(3, 1.0), std::out_of_range);
}
