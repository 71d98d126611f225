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
#include <vector>

#include <gtest/gtest.h>

#include "qmcs/partition.hpp"

namespace qmcs {
namespace {

TEST(RatioVariable, MeansAreZRatios) {
    const auto m = ising_model(Graph::cycle(4));
    const auto z = [&](double b) { return exact_partition(m, b); };
    EXPECT_NEAR(ratio_variable(m, 0.3, 1.1).mean(), z(1.1) / z(0.3), 1e-12);
    EXPECT_NEAR(ratio_variable(m, 0.3, kInfinity).mean(), z(kInfinity) / z(0.3), 1e-12);
    EXPECT_NEAR(reversed_ratio_variable(m, 0.3, 1.1).mean(), z(0.3) / z(1.1), 1e-12);
    EXPECT_THROW(ratio_variable(m, 1.0, 0.5), std::invalid_argument);
}

TEST(ChebyshevRatio, MatchesSecondMoment) {
    const auto m = matching_model(Graph::cycle(4));
    const auto y = ratio_variable(m, 0.2, 0.9);
    const double second = std::pow(y.moments().l2norm, 2) / (y.mean() * y.mean());
    EXPECT_NEAR(chebyshev_ratio(m, 0.2, 0.9, Direction::forward), second, 1e-12);
    const auto r = reversed_ratio_variable(m, 0.2, 0.9);
    EXPECT_NEAR(chebyshev_ratio(m, 0.2, 0.9, Direction::reversed),
                std::pow(r.moments().l2norm, 2) / (r.mean() * r.mean()), 1e-12);
}

TEST(Schedule, K2ClosedForm) {
    // Forward ratio at (0, b) is 2(1 + u^2)/(1 + u)^2 with u = e^{-b}; at B = 1.5
    // the boundary is u = 3 - 2 sqrt(2).
    const auto m = ising_model(Graph::complete(2));
    const auto s = build_schedule(m, 1.5, Direction::forward);
    ASSERT_EQ(s.betas.size(), 3U);
    EXPECT_EQ(s.betas[0], 0.0);
    EXPECT_NEAR(s.betas[1], -std::log(3.0 - 2.0 * std::sqrt(2.0)), 1e-9);
    EXPECT_EQ(s.betas[2], kInfinity);
    const auto wide = build_schedule(m, 2.0, Direction::forward);
    EXPECT_EQ(wide.betas, (std::vector<double>{0.0, kInfinity}));
    EXPECT_TRUE(verify_schedule(m, s).all_pass);
}

TEST(Schedule, VerificationRejectsBadSchedules) {
    const auto m = ising_model(Graph::cycle(4));
    EXPECT_FALSE(verify_schedule(m, {{0.0, kInfinity}, 1.2, Direction::forward}).all_pass);
    EXPECT_FALSE(verify_schedule(m, {{0.0, 2.0, 1.0, kInfinity}, 100.0, Direction::forward}).all_pass);
    EXPECT_FALSE(verify_schedule(m, {{0.5, kInfinity}, 100.0, Direction::forward}).all_pass);
    Rng rng(1);
    QueryLedger l;
    EXPECT_THROW(estimate_partition(m, {{0.0, kInfinity}, 1.2, Direction::forward}, 0.1, 0.1,
                                    PartitionMode::ideal_sampling, rng, l),
                 ContractViolation);
    EXPECT_THROW(build_schedule(m, 1.0, Direction::forward), std::invalid_argument);
}

TEST(Schedule, PairsSatisfyBound) {
    for (const auto &m : {ising_model(Graph::cycle(4)), matching_model(Graph::cycle(4)),
                          colouring_model(Graph::complete(3), 3)}) {
        for (const auto dir : {Direction::forward, Direction::reversed}) {
            const auto s = build_schedule(m, 2.0, dir);
            const auto rep = verify_schedule(m, s);
            EXPECT_TRUE(rep.all_pass);
            for (const auto &p : rep.pairs) {
                EXPECT_LE(p.ratio, 2.0 * (1 + 1e-12));
                EXPECT_GE(p.overlap_squared, 0.5 - 1e-12);
            }
        }
    }
}

TEST(Telescope, ProductRecoversTarget) {
    const auto m = matching_model(Graph::cycle(4));
    for (const auto dir : {Direction::forward, Direction::reversed}) {
        const auto s = build_schedule(m, 2.0, dir);
        const auto t = exact_telescope(m, s);
        double z = t.anchor;
        for (double r : t.ratios) {
            z *= r;
        }
        EXPECT_NEAR(z, t.target, 1e-9 * t.target);
    }
    // C4 has the empty matching, four single edges and two perfect matchings.
    EXPECT_NEAR(exact_partition(m, 0.0), 7.0, 1e-12);
}

TEST(Estimate, IdealAndIdealizedK2) {
    const auto m = ising_model(Graph::complete(2));
    const auto s = build_schedule(m, 1.5, Direction::forward);
    for (const auto mode : {PartitionMode::ideal_sampling, PartitionMode::walk_idealized}) {
        Rng rng(5);
        QueryLedger l;
        const auto e = estimate_partition(m, s, 0.1, 0.1, mode, rng, l);
        EXPECT_NEAR(e.z_value, 2.0, 0.2);
        EXPECT_EQ(e.ratios.size(), 2U);
        EXPECT_GT(l.reflection_uses + l.state_copies, 0U);
        if (mode == PartitionMode::walk_idealized) {
            EXPECT_GT(l.walk_steps, 0U);
        }
    }
}

TEST(Estimate, ReversedMatchingsC4) {
    const auto m = matching_model(Graph::cycle(4));
    const auto s = build_schedule(m, 2.0, Direction::reversed);
    Rng rng(9);
    QueryLedger l;
    const auto e = estimate_partition(m, s, 0.2, 0.1, PartitionMode::walk_idealized, rng, l);
    EXPECT_NEAR(e.z_value, 7.0, 0.2 * 7.0);
    EXPECT_EQ(e.target_beta, 0.0);
}

TEST(Estimate, ExactSimK2) {
    const auto m = ising_model(Graph::complete(2));
    const auto s = build_schedule(m, 1.5, Direction::forward);
    Rng rng(21);
    QueryLedger l;
    const auto e = estimate_partition(m, s, 0.2, 0.2, PartitionMode::walk_exact_sim, rng, l);
    EXPECT_NEAR(e.z_value, 2.0, 0.4);
    EXPECT_GT(l.walk_steps, 0U);
}

TEST(Baseline, SampleCountAndEstimate) {
    EXPECT_EQ(dyer_frieze_samples(2.0, 3, 0.1), 9600U);
    const auto m = ising_model(Graph::complete(2));
    const auto s = build_schedule(m, 1.5, Direction::forward);
    Rng rng(2);
    QueryLedger l;
    const auto e = classical_baseline(m, s, 0.1, rng, l);
    EXPECT_EQ(l.classical_samples, 2 * dyer_frieze_samples(1.5, 2, 0.1));
    EXPECT_NEAR(e.z_value, 2.0, 0.2);
    QueryLedger lm;
    const auto em = classical_baseline(m, s, 0.1, rng, lm, BaselineSampling::mixing);
    EXPECT_NEAR(em.z_value, 2.0, 0.2);
    EXPECT_GT(lm.walk_steps, 0U);
}

} // namespace
} // namespace qmcs
