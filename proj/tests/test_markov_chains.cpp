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

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "qmcs/markov.hpp"

namespace qmcs {
namespace {

MarkovChain two_state(double a, double b) {
    Eigen::MatrixXd P(2, 2);
    P << 1.0 - a, a, b, 1.0 - b;
    return MarkovChain::from_matrix(P);
}

TEST(Glauber, StationaryAndReversible) {
    for (const auto &m : {ising_model(Graph::cycle(4)), colouring_model(Graph::complete(3), 3)}) {
        for (double beta : {0.0, 0.8, 2.0}) {
            const auto c = glauber_chain(m, beta);
            const auto r = stationarity(c);
            EXPECT_LE(r.row_sum_residual, 1e-12);
            EXPECT_LE(r.stationarity_residual, 1e-12);
            EXPECT_LE(r.reversibility_residual, 1e-12);
            // Power iteration from a point mass converges to pi.
            std::vector<double> d(c.size(), 0.0);
            d[0] = 1.0;
            EXPECT_LE(total_variation(evolve(c, d, static_cast<int>(40.0 * relaxation_time(c))), c.pi), 1e-6);
        }
    }
}

TEST(Glauber, HeatBathRowsK2) {
    // From state 00 at beta: pick a vertex (1/2) and resample it; the
    // conditional law puts weight 1 on agreeing and e^{-beta} on flipping.
    const double beta = 0.9;
    const auto c = glauber_chain(ising_model(Graph::complete(2)), beta);
    const auto P = c.dense();
    const double flip = std::exp(-beta) / (1.0 + std::exp(-beta));
    EXPECT_NEAR(P(0, 1), 0.5 * flip, 1e-15);
    EXPECT_NEAR(P(0, 2), 0.5 * flip, 1e-15);
    EXPECT_NEAR(P(0, 3), 0.0, 1e-15);
    EXPECT_NEAR(P(0, 0), 1.0 - flip, 1e-15);
}

TEST(MatchingChain, Stationary) {
    const auto m = matching_model(Graph::cycle(5));
    for (double beta : {0.0, 1.0}) {
        const auto c = matching_chain(m, beta);
        const auto r = stationarity(c);
        EXPECT_LE(r.stationarity_residual, 1e-12);
        EXPECT_LE(r.reversibility_residual, 1e-12);
        EXPECT_GE(relaxation_time(c), 1.0);
    }
}

TEST(Spectrum, TwoStateClosedForm) {
    for (auto [a, b] : {std::pair{0.125, 0.125}, std::pair{0.3, 0.1}, std::pair{0.9, 0.8}}) {
        const auto s = chain_spectrum(two_state(a, b));
        EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-12);
        EXPECT_NEAR(s.lambda1, std::abs(1.0 - a - b), 1e-12);
        EXPECT_NEAR(s.tau, 1.0 / (1.0 - std::abs(1.0 - a - b)), 1e-10);
    }
    EXPECT_NEAR(relaxation_time(two_state(0.125, 0.125)), 4.0, 1e-10);
}

TEST(Spectrum, MatchesNonsymmetricEigenvalues) {
    const auto c = glauber_chain(colouring_model(Graph::path(3), 3), 0.6);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(c.dense());
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-9);
        ev.push_back(es.eigenvalues()(i).real());
    }
    std::sort(ev.rbegin(), ev.rend());
    const auto s = chain_spectrum(c);
    ASSERT_EQ(ev.size(), s.eigenvalues.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        EXPECT_NEAR(ev[i], s.eigenvalues[i], 1e-9);
    }
}

TEST(Spectrum, NonErgodicThrows) {
    EXPECT_THROW(chain_spectrum(two_state(1.0, 1.0)), ContractViolation);
}

TEST(FromMatrix, SolvesStationaryLaw) {
    const auto c = two_state(0.3, 0.1);
    EXPECT_NEAR(c.pi[0], 0.25, 1e-12);
    EXPECT_NEAR(c.pi[1], 0.75, 1e-12);
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.4, 0.5, 0.5;
    EXPECT_THROW(MarkovChain::from_matrix(bad), std::invalid_argument);
}

TEST(Lazy, HalvesTheSpectrum) {
    const auto c = two_state(0.9, 0.8);
    const auto l = c.make_lazy();
    EXPECT_NEAR(chain_spectrum(l).eigenvalues[1], (1.0 + (1.0 - 0.9 - 0.8)) / 2.0, 1e-12);
    EXPECT_EQ(l.pi, c.pi);
}

TEST(Sampling, LedgerAndLaw) {
    const auto c = two_state(0.3, 0.1);
    Rng rng(3);
    QueryLedger l;
    int ones = 0;
    const int n = 20000;
    std::size_t x = 0;
    for (int i = 0; i < n; ++i) {
        x = mix_sample(c, x, 25, rng, l);
        ones += x == 1 ? 1 : 0;
    }
    EXPECT_EQ(l.walk_steps, 25U * n);
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.75, 4.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST(MixingSteps, Formula) {
    EXPECT_EQ(mixing_steps(4.0, 0.01, 0.25), static_cast<std::uint64_t>(std::ceil(4.0 * std::log(400.0))));
}

} // namespace
} // namespace qmcs
