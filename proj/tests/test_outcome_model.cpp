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
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qmcs/distribution.hpp"
#include "qmcs/parallel.hpp"
#include "qmcs/powering.hpp"

namespace qmcs {
namespace {

// P[Bin(n, p) >= k] by summing the pmf with a running product.
double binomial_tail_oracle(int n, double p, int k) {
    double pmf = std::pow(1.0 - p, n);
    double tail = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (i >= k) {
            tail += pmf;
        }
        pmf *= (n - i) / static_cast<double>(i + 1) * p / (1.0 - p);
    }
    return tail;
}

TEST(MakeDistribution, PointMass) {
    const auto d = ValueDistribution::from_pairs({{0.5, 1.0}});
    ASSERT_EQ(d.size(), 1U);
    EXPECT_EQ(d.support()[0].value, 0.5);
    EXPECT_EQ(d.support()[0].prob, 1.0);
}

TEST(MakeDistribution, MergesDuplicates) {
    const auto d = ValueDistribution::from_pairs({{1.0, 0.5}, {1.0, 0.5}});
    ASSERT_EQ(d.size(), 1U);
    EXPECT_EQ(d.support()[0].value, 1.0);
    EXPECT_DOUBLE_EQ(d.support()[0].prob, 1.0);
}

TEST(MakeDistribution, SortsAndNormalises) {
    const auto d = ValueDistribution::from_pairs({{3.0, 0.25}, {-1.0, 0.75 + 5e-10}});
    ASSERT_EQ(d.size(), 2U);
    EXPECT_EQ(d.support()[0].value, -1.0);
    double s = 0.0;
    for (const auto &o : d.support()) {
        s += o.prob;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(MakeDistribution, Bernoulli) {
    const auto m = ValueDistribution::from_pairs({{0.0, 0.5}, {1.0, 0.5}}).moments();
    EXPECT_DOUBLE_EQ(m.mean, 0.5);
    EXPECT_DOUBLE_EQ(m.variance, 0.25);
    EXPECT_DOUBLE_EQ(m.l2norm, std::sqrt(0.5));
}

TEST(MakeDistribution, Rejects) {
    EXPECT_THROW(ValueDistribution::from_pairs({}), std::invalid_argument);
    EXPECT_THROW(ValueDistribution::from_pairs({{0.0, -0.1}, {1.0, 1.1}}), std::invalid_argument);
    EXPECT_THROW(ValueDistribution::from_pairs({{INFINITY, 1.0}}), std::invalid_argument);
    EXPECT_THROW(ValueDistribution::from_pairs({{0.0, 0.5}}), std::invalid_argument);
}

TEST(Truncate, Examples) {
    const auto all = truncate(ValueDistribution::point_mass(0.5), TruncationMode::range, 1.0, 2.0);
    EXPECT_EQ(all.size(), 1U);
    EXPECT_EQ(all.support()[0].value, 0.0);

    const auto half_open = truncate(ValueDistribution::bernoulli(0.5), TruncationMode::range, 0.0, 1.0);
    EXPECT_EQ(half_open.mean(), 0.0);

    const auto d = ValueDistribution::from_pairs({{1.0, 0.5}, {3.0, 0.5}});
    const auto t = truncate(d, TruncationMode::at_least, 2.0);
    ASSERT_EQ(t.size(), 2U);
    EXPECT_EQ(t.support()[0].value, 0.0);
    EXPECT_DOUBLE_EQ(t.support()[0].prob, 0.5);
    EXPECT_DOUBLE_EQ(t.mean(), 1.5);

    EXPECT_THROW(truncate(d, TruncationMode::range, 2.0, 1.0), std::invalid_argument);
}

TEST(Transform, IdentityScaleAndNegation) {
    const auto d = ValueDistribution::from_pairs({{-2.0, 0.25}, {1.0, 0.25}, {3.0, 0.5}});
    const auto same = transform(d, [](double v) { return v; });
    EXPECT_EQ(tv_distance(d, same), 0.0);

    const auto s = scale(ValueDistribution::point_mass(4.0), 0.5);
    EXPECT_EQ(s.support()[0].value, 2.0);

    // -B_{<0}: negate the negative part, everything else maps to 0.
    const auto neg = transform(truncate(d, TruncationMode::below, 0.0), [](double v) { return -v; });
    EXPECT_DOUBLE_EQ(neg.mean(), 0.5);
    EXPECT_GE(neg.min_value(), 0.0);

    EXPECT_THROW(transform(d, [](double v) { return std::log(v); }), std::invalid_argument);
}

TEST(Moments, ThreePoint) {
    const auto m = ValueDistribution::from_pairs({{4.0, 0.25}, {5.0, 0.5}, {6.0, 0.25}}).moments();
    EXPECT_DOUBLE_EQ(m.mean, 5.0);
    EXPECT_DOUBLE_EQ(m.variance, 0.5);
    EXPECT_DOUBLE_EQ(m.l2norm, std::sqrt(25.5));

    const auto p = ValueDistribution::point_mass(-3.0).moments();
    EXPECT_EQ(p.mean, -3.0);
    EXPECT_EQ(p.variance, 0.0);
    EXPECT_EQ(p.l2norm, 3.0);
}

TEST(ClassicalSample, PointMassAndLedger) {
    Rng rng(1);
    QueryLedger l;
    const auto d = ValueDistribution::point_mass(7.0);
    for (int i = 0; i < 10; ++i) {
        const QueryLedger before = l;
        EXPECT_EQ(classical_sample(d, rng, l), 7.0);
        EXPECT_EQ(l.since(before).classical_samples, 1U);
        EXPECT_EQ(l.since(before).quantum_total(), 0U);
    }
}

TEST(ClassicalSample, BernoulliMean) {
    Rng rng(2);
    QueryLedger l;
    const auto d = ValueDistribution::bernoulli(0.5);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        s += classical_sample(d, rng, l);
    }
    EXPECT_NEAR(s / n, 0.5, 0.01);
    EXPECT_EQ(l.classical_samples, static_cast<std::uint64_t>(n));
}

TEST(Ledger, AdditiveAndOrderIndependent) {
    QueryLedger a{1, 2, 3, 4, 5, 6};
    QueryLedger b{10, 20, 30, 40, 50, 60};
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b).since(a), b);
    EXPECT_EQ((a + b).quantum_total(), 44U + 55U);
    EXPECT_THROW(checked_cost(std::uint64_t{1} << 40, std::uint64_t{1} << 40), std::overflow_error);
    EXPECT_EQ(checked_cost(3, 4, 5), 17U);
}

TEST(Rng, DeterministicAndSplit) {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seeds.insert(trial_seed(7, i));
    }
    EXPECT_EQ(seeds.size(), 1000U);
}

TEST(Powering, BinomialTailMatchesOracle) {
    for (int n : {1, 3, 9, 31}) {
        for (double p : {0.01, 0.19, 0.3, 0.49}) {
            for (int k = 0; k <= n; ++k) {
                EXPECT_NEAR(binomial_upper_tail(n, p, k), binomial_tail_oracle(n, p, k), 1e-12);
            }
        }
    }
}

TEST(Powering, MedianRepsIsMinimal) {
    const double g = 1.0 - 8.0 / (kPi * kPi);
    EXPECT_EQ(median_reps(g, 0.1), 3);
    EXPECT_EQ(median_reps(g, 1.0 / 130.0), 13);
    EXPECT_EQ(median_reps(0.2, 1.0 / 9.0), 3);
    EXPECT_EQ(median_reps(0.25, 0.25), 1);
    EXPECT_EQ(median_reps(1.0 / 3.0, 0.01), 47);
    for (double delta : {0.2, 0.05, 1e-3, 1e-6}) {
        const int n = median_reps(0.3, delta);
        EXPECT_LE(binomial_tail_oracle(n, 0.3, (n + 1) / 2), delta);
        if (n > 1) {
            EXPECT_GT(binomial_tail_oracle(n - 2, 0.3, (n - 1) / 2), delta);
        }
    }
    EXPECT_THROW(median_reps(0.5, 0.1), std::invalid_argument);
}

TEST(Powering, MedianOf) {
    std::vector<double> xs{5.0, 1.0, 3.0};
    EXPECT_EQ(median_of(xs), 3.0);
    std::vector<double> even{1.0, 2.0};
    EXPECT_THROW(median_of(even), std::invalid_argument);
}

TEST(Parallel, IndependentOfWorkerCount) {
    const auto trial = [](std::size_t i, Rng &rng, QueryLedger &l) {
        l.classical_samples += i;
        return rng.uniform();
    };
    setenv("QMCS_THREADS", "1", 1);
    QueryLedger l1;
    const auto one = run_trials<double>(9, 200, trial, &l1);
    setenv("QMCS_THREADS", "8", 1);
    QueryLedger l8;
    const auto many = run_trials<double>(9, 200, trial, &l8);
    unsetenv("QMCS_THREADS");
    EXPECT_EQ(one, many);
    EXPECT_EQ(l1, l8);
    EXPECT_EQ(l1.classical_samples, 199U * 200U / 2U);
}

TEST(Parallel, PropagatesExceptions) {
    const auto trial = [](std::size_t i, Rng &, QueryLedger &) -> int {
        if (i == 17) {
            throw std::runtime_error("boom");
        }
        return 0;
    };
    EXPECT_THROW(run_trials<int>(1, 50, trial), std::runtime_error);
}

} // namespace
} // namespace qmcs
