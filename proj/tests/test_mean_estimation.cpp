// Copyright 2026 The qmcs Authors
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
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "qmcs/mean_estimation.hpp"
#include "qmcs/parallel.hpp"

namespace qmcs {
namespace {

double coverage_floor(double p, int n) {
    return p - 3.0 * std::sqrt(p * (1.0 - p) / n);
}

TEST(Parameters, IterationsForAccuracyIsMinimal) {
    for (double eps : {0.5, 0.1, 0.01, 0.0033}) {
        for (double C : {1.0, 5.1}) {
            const auto t = iterations_for_accuracy(eps, C);
            const double tt = static_cast<double>(t);
            EXPECT_LE(C * (1.0 / tt + 1.0 / (tt * tt)), eps);
            if (t > 1) {
                EXPECT_GT(C * (1.0 / (tt - 1.0) + 1.0 / ((tt - 1.0) * (tt - 1.0))), eps);
            }
        }
    }
    EXPECT_THROW(iterations_for_accuracy(0.0), std::invalid_argument);
}

TEST(Parameters, L2) {
    const auto p = l2_parameters(0.05, 20.4);
    EXPECT_EQ(p.k, 5);
    EXPECT_EQ(p.t0 % 4, 0);
    EXPECT_GE(static_cast<double>(p.t0), 20.4 * std::sqrt(std::log2(20.0)) / 0.05);
    EXPECT_LT(static_cast<double>(p.t0), 20.4 * std::sqrt(std::log2(20.0)) / 0.05 + 4.0);
    EXPECT_DOUBLE_EQ(EstimatorConstants{}.D, 20.4);
    EXPECT_DOUBLE_EQ(EstimatorConstants::with_C(1.0).D, 10.0);
}

TEST(Bounded, CoverageAndCharging) {
    const auto d = ValueDistribution::bernoulli(0.25);
    const double eps = 0.01;
    const double delta = 0.05;
    const auto t = iterations_for_accuracy(eps);
    const int n = 300;
    const auto ok = run_trials<int>(1, n, [&](std::size_t, Rng &rng, QueryLedger &l) {
        const auto e = estimate_mean_bounded(d, t, delta, rng, l);
        EXPECT_EQ(e.ledger.reflection_uses, static_cast<std::uint64_t>(t * median_reps(kAeFailure, delta)));
        EXPECT_LE(e.target_error, eps);
        return std::abs(e.value - 0.25) <= eps ? 1 : 0;
    });
    int hit = 0;
    for (int v : ok) {
        hit += v;
    }
    EXPECT_GE(static_cast<double>(hit) / n, coverage_floor(1.0 - delta, n));
}

TEST(Bounded, RejectsUnboundedSupport) {
    Rng rng(1);
    QueryLedger l;
    EXPECT_THROW(estimate_mean_bounded(ValueDistribution::point_mass(1.5), 8, 0.1, rng, l), std::invalid_argument);
    EXPECT_THROW(estimate_mean_bounded(ValueDistribution::point_mass(-0.5), 8, 0.1, rng, l), std::invalid_argument);
}

TEST(L2, HeavyTailCoverage) {
    const auto d = ValueDistribution::from_pairs({{0.0, 63.0 / 64.0}, {8.0, 1.0 / 64.0}});
    const double eps = 0.05;
    const double bound = eps * 4.0;
    EXPECT_DOUBLE_EQ(d.moments().l2norm, 1.0);
    const int n = 300;
    const auto ok = run_trials<int>(2, n, [&](std::size_t, Rng &rng, QueryLedger &l) {
        return std::abs(estimate_mean_l2(d, eps, rng, l).value - 0.125) <= bound ? 1 : 0;
    });
    int hit = 0;
    for (int v : ok) {
        hit += v;
    }
    EXPECT_GE(static_cast<double>(hit) / n, coverage_floor(0.8, n));
}

TEST(L2, Contracts) {
    Rng rng(1);
    QueryLedger l;
    EXPECT_THROW(estimate_mean_l2(ValueDistribution::point_mass(-1.0), 0.1, rng, l), std::invalid_argument);
    EXPECT_THROW(estimate_mean_l2(ValueDistribution::point_mass(1.0), 0.6, rng, l), std::invalid_argument);
    // A point mass at 1 is estimated exactly: amplitude 1/2 is on the grid.
    EXPECT_DOUBLE_EQ(estimate_mean_l2(ValueDistribution::point_mass(1.0), 0.1, rng, l).value, 1.0);
}

TEST(Variance, CoverageOnThreePoint) {
    const auto d = ValueDistribution::from_pairs({{4.0, 0.25}, {5.0, 0.5}, {6.0, 0.25}});
    const int n = 200;
    const auto ok = run_trials<int>(3, n, [&](std::size_t, Rng &rng, QueryLedger &l) {
        const auto e = estimate_mean_variance(d, 1.0, 0.05, rng, l);
        EXPECT_EQ(e.ledger.classical_samples, 1U);
        return std::abs(e.value - 5.0) <= 0.05 ? 1 : 0;
    });
    int hit = 0;
    for (int v : ok) {
        hit += v;
    }
    EXPECT_GE(static_cast<double>(hit) / n, coverage_floor(2.0 / 3.0, n));
}

TEST(Variance, Contracts) {
    Rng rng(1);
    QueryLedger l;
    const auto d = ValueDistribution::bernoulli(0.5);
    EXPECT_THROW(estimate_mean_variance(d, 0.0, 0.1, rng, l), std::invalid_argument);
    EXPECT_THROW(estimate_mean_variance(d, 0.5, 2.0, rng, l), std::invalid_argument);
}

TEST(Relative, Coverage) {
    const auto d = ValueDistribution::from_pairs({{1.0, 0.5}, {3.0, 0.5}});
    const int n = 200;
    const auto ok = run_trials<int>(4, n, [&](std::size_t, Rng &rng, QueryLedger &l) {
        const auto e = estimate_mean_relative(d, 1.25, 0.05, rng, l);
        EXPECT_EQ(e.error_kind, ErrorKind::relative);
        EXPECT_EQ(e.ledger.classical_samples, 40U);
        return std::abs(e.value - 2.0) <= 0.1 ? 1 : 0;
    });
    int hit = 0;
    for (int v : ok) {
        hit += v;
    }
    EXPECT_GE(static_cast<double>(hit) / n, coverage_floor(0.75, n));
}

TEST(Relative, ZeroProxy) {
    Rng rng(1);
    QueryLedger l;
    EXPECT_THROW(estimate_mean_relative(ValueDistribution::point_mass(0.0), 2.0, 0.1, rng, l), ZeroProxyMean);
    EXPECT_THROW(estimate_mean_relative(ValueDistribution::point_mass(1.0), 0.5, 0.1, rng, l),
                 std::invalid_argument);
}

TEST(PowerMedian, SumsLedgersAndTakesMedian) {
    int call = 0;
    const std::vector<double> values{3.0, 1.0, 2.0};
    const auto e = power_median(
        [&] {
            Estimate x;
            x.value = values[static_cast<std::size_t>(call++ % 3)];
            x.ledger.a_uses = 2;
            return x;
        },
        0.2, 1.0 / 9.0);
    EXPECT_EQ(call, 3);
    EXPECT_EQ(e.value, 2.0);
    EXPECT_EQ(e.ledger.a_uses, 6U);
}

TEST(Chebyshev, SampleCountAndAccuracy) {
    EXPECT_EQ(chebyshev_samples(1.0, 0.1, 1.0 / 3.0), 300U);
    EXPECT_EQ(chebyshev_samples(2.0, 0.5, 0.1), 160U);
    Rng rng(5);
    QueryLedger l;
    const auto d = ValueDistribution::from_pairs({{4.0, 0.25}, {5.0, 0.5}, {6.0, 0.25}});
    const auto e = classical_mean_chebyshev(d, 1.0, 0.05, 0.1, rng, l);
    EXPECT_EQ(l.classical_samples, chebyshev_samples(1.0, 0.05, 0.1));
    EXPECT_NEAR(e.value, 5.0, 0.05);
}

TEST(Determinism, SameSeedSameResult) {
    const auto d = ValueDistribution::from_pairs({{4.0, 0.25}, {5.0, 0.5}, {6.0, 0.25}});
    Rng a(11);
    Rng b(11);
    QueryLedger la;
    QueryLedger lb;
    EXPECT_EQ(estimate_mean_variance(d, 1.0, 0.05, a, la).value, estimate_mean_variance(d, 1.0, 0.05, b, lb).value);
    EXPECT_EQ(la, lb);
}

} // namespace
} // namespace qmcs
