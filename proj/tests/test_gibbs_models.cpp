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

#include "qmcs/gibbs.hpp"

namespace qmcs {
namespace {

// Matching-size histogram by brute force over all edge subsets.
std::vector<double> matching_histogram(const Graph &g) {
    std::vector<double> h(static_cast<std::size_t>(g.n_vertices) + 1, 0.0);
    const std::uint64_t m = g.n_edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<int> deg(static_cast<std::size_t>(g.n_vertices), 0);
        bool ok = true;
        int size = 0;
        for (std::uint64_t e = 0; e < m; ++e) {
            if ((mask >> e) & 1U) {
                ++size;
                ok = ok && ++deg[static_cast<std::size_t>(g.edges[e].first)] == 1 &&
                     ++deg[static_cast<std::size_t>(g.edges[e].second)] == 1;
            }
        }
        if (ok) {
            h[static_cast<std::size_t>(size)] += 1.0;
        }
    }
    return h;
}

// Sum over all q-colourings of exp(-beta * #monochromatic edges).
double colouring_oracle(const Graph &g, int q, double beta) {
    const int n = g.n_vertices;
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    double z = 0.0;
    for (;;) {
        int mono = 0;
        for (const auto &[u, v] : g.edges) {
            mono += c[static_cast<std::size_t>(u)] == c[static_cast<std::size_t>(v)] ? 1 : 0;
        }
        z += mono == 0 ? 1.0 : std::exp(-beta * mono);
        int i = 0;
        while (i < n && ++c[static_cast<std::size_t>(i)] == q) {
            c[static_cast<std::size_t>(i++)] = 0;
        }
        if (i == n) {
            return z;
        }
    }
}

TEST(Graph, Builders) {
    EXPECT_EQ(Graph::complete(4).n_edges(), 6U);
    EXPECT_EQ(Graph::cycle(5).n_edges(), 5U);
    EXPECT_EQ(Graph::path(3).n_edges(), 2U);
    EXPECT_THROW(Graph::make(2, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(Graph::make(2, {{0, 1}, {1, 0}}), std::invalid_argument);
    EXPECT_THROW(Graph::make(2, {{0, 2}}), std::invalid_argument);
}

TEST(Ising, K2Values) {
    const auto m = ising_model(Graph::complete(2));
    EXPECT_EQ(m.size(), 4U);
    EXPECT_DOUBLE_EQ(exact_partition(m, 0.0), 4.0);
    EXPECT_DOUBLE_EQ(exact_partition(m, kInfinity), 2.0);
    const auto p = gibbs_distribution(m, std::log(2.0));
    // States 00 and 11 agree (energy 0); 01 and 10 disagree.
    EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p[3], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p[1], 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(p[2], 1.0 / 6.0, 1e-15);
    const auto g = gibbs_distribution(m, kInfinity);
    EXPECT_EQ(g[0], 0.5);
    EXPECT_EQ(g[1], 0.0);
}

TEST(Ising, SpinConventionIdentity) {
    for (const auto &g : {Graph::complete(2), Graph::cycle(4), Graph::complete(4)}) {
        const auto m = ising_model(g);
        for (double beta : {0.0, 0.3, 1.1}) {
            const double lhs = ising_spin_partition(m, beta);
            const double rhs = std::exp(beta * static_cast<double>(g.n_edges())) * exact_partition(m, 2.0 * beta);
            EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
        }
    }
}

TEST(Colouring, MatchesOracle) {
    const auto g = Graph::complete(3);
    const auto m = colouring_model(g, 3);
    EXPECT_EQ(m.size(), 27U);
    EXPECT_DOUBLE_EQ(exact_partition(m, kInfinity), 6.0);
    for (double beta : {0.0, 0.7, 2.5}) {
        EXPECT_NEAR(exact_partition(m, beta), colouring_oracle(g, 3, beta), 1e-12);
    }
    const auto c4 = Graph::cycle(4);
    EXPECT_NEAR(exact_partition(colouring_model(c4, 2), 1.0), colouring_oracle(c4, 2, 1.0), 1e-12);
}

TEST(Matching, C4) {
    const auto g = Graph::cycle(4);
    const auto m = matching_model(g);
    EXPECT_EQ(m.size(), 7U);
    EXPECT_DOUBLE_EQ(exact_partition(m, 0.0), 7.0);
    EXPECT_DOUBLE_EQ(exact_partition(m, kInfinity), 1.0);
    const auto h = matching_histogram(g);
    for (double beta : {0.0, 0.5, 3.0}) {
        double z = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            z += h[k] * std::exp(-beta * static_cast<double>(k));
        }
        EXPECT_NEAR(exact_partition(m, beta), z, 1e-12);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m.index_of(m.codes[i]), i);
    }
}

TEST(Matching, K4MatchesBruteForce) {
    const auto g = Graph::complete(4);
    const auto m = matching_model(g);
    const auto h = matching_histogram(g);
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double count = k < m.energy_counts.size() ? m.energy_counts[k] : 0.0;
        EXPECT_EQ(count, h[k]);
    }
}

TEST(Partition, MonotoneInBeta) {
    for (const auto &m : {ising_model(Graph::cycle(4)), colouring_model(Graph::complete(3), 3),
                          matching_model(Graph::cycle(5))}) {
        double prev = exact_partition(m, 0.0);
        for (double beta : {0.1, 0.5, 1.0, 4.0, kInfinity}) {
            const double z = exact_partition(m, beta);
            EXPECT_LT(z, prev);
            prev = z;
        }
    }
    const auto flat = ising_model(Graph::edgeless(3));
    EXPECT_DOUBLE_EQ(exact_partition(flat, 0.0), exact_partition(flat, 5.0));
}

TEST(ChiSquared, Examples) {
    const auto k2 = ising_model(Graph::complete(2));
    EXPECT_NEAR(chi_squared(k2, 0.7, 0.7).definitional, 0.0, 1e-15);
    const auto c = chi_squared(k2, 0.0, std::log(2.0));
    EXPECT_NEAR(c.ratio_form, 1.0 / 9.0, 1e-12);
    EXPECT_NEAR(c.definitional, 1.0 / 9.0, 1e-12);
    const auto tri = colouring_model(Graph::complete(3), 3);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const double a = 2.0 * rng.uniform();
        const double b = a + 2.0 * rng.uniform();
        const auto x = chi_squared(tri, a, b);
        EXPECT_NEAR(x.definitional, x.ratio_form, 1e-10);
        EXPECT_GE(overlap_squared(tri, a, b), 1.0 / (1.0 + x.definitional) - 1e-12);
    }
    EXPECT_THROW(chi_squared(k2, 1.0, 0.5), std::invalid_argument);
}

TEST(Limits, StateSpaceCap) {
    EXPECT_THROW(ising_model(Graph::edgeless(21)), std::invalid_argument);
    EXPECT_NO_THROW(ising_model(Graph::edgeless(12)));
}

} // namespace
} // namespace qmcs
