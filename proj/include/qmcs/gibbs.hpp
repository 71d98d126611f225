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

/**
 * @file
 * Enumerated Gibbs models with exact partition-function oracles.
 *
 * Inverse temperatures may be +infinity, which restricts every sum to the
 * zero-energy states.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qmcs/core.hpp"

namespace qmcs {

inline constexpr std::size_t kMaxStates = std::size_t{1} << 20;

struct Graph {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges;

    /// @throws std::invalid_argument on self-loops, duplicates or bad indices.
    static Graph make(int n, std::vector<std::pair<int, int>> edges) {
        require(n >= 1, "graph: need at least one vertex");
        std::set<std::pair<int, int>> seen;
        for (auto &[u, v] : edges) {
            require(u >= 0 && v >= 0 && u < n && v < n, "graph: vertex out of range");
            require(u != v, "graph: self-loop");
            const auto key = std::minmax(u, v);
            require(seen.insert({key.first, key.second}).second, "graph: duplicate edge");
        }
        return {n, std::move(edges)};
    }

    static Graph edgeless(int n) { return make(n, {}); }

    static Graph path(int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i + 1 < n; ++i) {
            e.emplace_back(i, i + 1);
        }
        return make(n, e);
    }

    static Graph cycle(int n) {
        require(n >= 3, "cycle: need n >= 3");
        auto g = path(n);
        g.edges.emplace_back(n - 1, 0);
        return g;
    }

    static Graph complete(int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                e.emplace_back(i, j);
            }
        }
        return make(n, e);
    }

    [[nodiscard]] std::size_t n_edges() const { return edges.size(); }
};

enum class ModelKind { ising, colouring, matching };

inline std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::ising:
        return "ising";
    case ModelKind::colouring:
        return "colouring";
    case ModelKind::matching:
        return "matching";
    }
    return "?";
}

/**
 * Enumerated configuration space with integer energies.
 *
 * Ising and colouring states are encoded as base-q digit strings (q = 2 for
 * Ising) and the code is the state index. Matching states are edge bitmasks.
 */
struct GibbsModel {
    ModelKind kind;
    Graph graph;
    int q = 2;
    std::vector<std::uint64_t> codes;
    std::vector<int> energy;
    int max_energy = 0;
    std::vector<double> energy_counts;
    std::unordered_map<std::uint64_t, std::size_t> code_index;

    [[nodiscard]] std::size_t size() const { return codes.size(); }
    [[nodiscard]] std::string name() const { return to_string(kind); }

    /// Digit of vertex v in a spin/colour code.
    [[nodiscard]] int site(std::uint64_t code, int v) const {
        for (int i = 0; i < v; ++i) {
            code /= static_cast<std::uint64_t>(q);
        }
        return static_cast<int>(code % static_cast<std::uint64_t>(q));
    }

    /// Index of a state code; matchings use a lookup table.
    [[nodiscard]] std::size_t index_of(std::uint64_t code) const {
        if (kind != ModelKind::matching) {
            return static_cast<std::size_t>(code);
        }
        return code_index.at(code);
    }

    void finalise() {
        max_energy = 0;
        for (int e : energy) {
            max_energy = std::max(max_energy, e);
        }
        energy_counts.assign(static_cast<std::size_t>(max_energy) + 1, 0.0);
        for (int e : energy) {
            energy_counts[static_cast<std::size_t>(e)] += 1.0;
        }
        if (kind == ModelKind::matching) {
            code_index.clear();
            for (std::size_t i = 0; i < codes.size(); ++i) {
                code_index[codes[i]] = i;
            }
        }
    }
};

/// e^{-beta E} with the infinite-temperature conventions made explicit.
inline double boltzmann_weight(double beta, int e) {
    if (e == 0) {
        return 1.0;
    }
    if (beta == kInfinity) {
        return 0.0;
    }
    if (beta == -kInfinity) {
        return kInfinity;
    }
    return std::exp(-beta * e);
}

namespace detail {

inline GibbsModel spin_model(ModelKind kind, const Graph &g, int q) {
    require(q >= 1, "model: need at least one colour");
    double count = 1.0;
    for (int i = 0; i < g.n_vertices; ++i) {
        count *= q;
    }
    require(count <= static_cast<double>(kMaxStates), "model: state space exceeds 2^20");
    GibbsModel m{kind, g, q, {}, {}, 0, {}, {}};
    const auto n = static_cast<std::uint64_t>(count);
    m.codes.resize(n);
    m.energy.resize(n);
    std::vector<int> digits(static_cast<std::size_t>(g.n_vertices));
    for (std::uint64_t c = 0; c < n; ++c) {
        std::uint64_t r = c;
        for (auto &d : digits) {
            d = static_cast<int>(r % static_cast<std::uint64_t>(q));
            r /= static_cast<std::uint64_t>(q);
        }
        int e = 0;
        for (const auto &[u, v] : g.edges) {
            e += digits[static_cast<std::size_t>(u)] == digits[static_cast<std::size_t>(v)] ? 0 : 1;
        }
        m.codes[c] = c;
        m.energy[c] = kind == ModelKind::ising ? e : static_cast<int>(g.n_edges()) - e;
    }
    m.finalise();
    return m;
}

} // namespace detail

/// Ising model with energy equal to the number of disagreeing edges.
inline GibbsModel ising_model(const Graph &g) {
    return detail::spin_model(ModelKind::ising, g, 2);
}

/// Potts colouring model with energy equal to the monochromatic edge count.
inline GibbsModel colouring_model(const Graph &g, int k) {
    return detail::spin_model(ModelKind::colouring, g, k);
}

/// Monomer-dimer model: states are matchings, energy is the matching size.
inline GibbsModel matching_model(const Graph &g) {
    require(g.n_edges() <= 64, "matching_model: at most 64 edges");
    GibbsModel m{ModelKind::matching, g, 2, {}, {}, 0, {}, {}};
    std::function<void(std::size_t, std::uint64_t, std::uint64_t, int)> rec =
        [&](std::size_t i, std::uint64_t used, std::uint64_t mask, int size) {
            if (i == g.n_edges()) {
                require(m.codes.size() < kMaxStates, "matching_model: state space exceeds 2^20");
                m.codes.push_back(mask);
                m.energy.push_back(size);
                return;
            }
            rec(i + 1, used, mask, size);
            const auto [u, v] = g.edges[i];
            const std::uint64_t bits = (std::uint64_t{1} << u) | (std::uint64_t{1} << v);
            if ((used & bits) == 0) {
                rec(i + 1, used | bits, mask | (std::uint64_t{1} << i), size + 1);
            }
        };
    require(g.n_vertices <= 64, "matching_model: at most 64 vertices");
    rec(0, 0, 0, 0);
    m.finalise();
    return m;
}

/// Z(beta) summed over the energy histogram.
inline double exact_partition(const GibbsModel &m, double beta) {
    require(!std::isnan(beta), "exact_partition: beta is NaN");
    double z = 0.0;
    for (std::size_t e = 0; e < m.energy_counts.size(); ++e) {
        if (m.energy_counts[e] > 0.0) {
            z += m.energy_counts[e] * boltzmann_weight(beta, static_cast<int>(e));
        }
    }
    return z;
}

/// Probability of each enumerated state at inverse temperature beta.
inline std::vector<double> gibbs_distribution(const GibbsModel &m, double beta) {
    const double z = exact_partition(m, beta);
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw ContractViolation("gibbs_distribution: Z(beta) is zero or infinite");
    }
    std::vector<double> p(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        p[i] = boltzmann_weight(beta, m.energy[i]) / z;
    }
    return p;
}

struct ChiSquared {
    double definitional;
    double ratio_form;
};

/// chi^2(pi_j, pi_i) both from its definition and from partition functions.
inline ChiSquared chi_squared(const GibbsModel &m, double beta_i, double beta_j) {
    require(beta_i <= beta_j, "chi_squared: need beta_i <= beta_j");
    require(std::isfinite(beta_i), "chi_squared: beta_i must be finite");
    const auto pi = gibbs_distribution(m, beta_i);
    const auto pj = gibbs_distribution(m, beta_j);
    double s = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) {
        const double r = pj[x] / pi[x] - 1.0;
        s += pi[x] * r * r;
    }
    const double zj = exact_partition(m, beta_j);
    const double ratio =
        exact_partition(m, beta_i) * exact_partition(m, 2.0 * beta_j - beta_i) / (zj * zj) - 1.0;
    return {s, ratio};
}

/// Squared overlap <pi_i|pi_j>^2 of the coherent Gibbs states.
inline double overlap_squared(const GibbsModel &m, double beta_i, double beta_j) {
    const auto pi = gibbs_distribution(m, beta_i);
    const auto pj = gibbs_distribution(m, beta_j);
    double s = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) {
        s += std::sqrt(pi[x] * pj[x]);
    }
    return s * s;
}

/// Z in the spin convention H(z) = -sum z_u z_v, by direct enumeration.
inline double ising_spin_partition(const GibbsModel &m, double beta) {
    require(m.kind == ModelKind::ising, "ising_spin_partition: needs an Ising model");
    require(std::isfinite(beta), "ising_spin_partition: beta must be finite");
    double z = 0.0;
    for (const auto code : m.codes) {
        int h = 0;
        for (const auto &[u, v] : m.graph.edges) {
            const int zu = m.site(code, u) == 1 ? 1 : -1;
            const int zv = m.site(code, v) == 1 ? 1 : -1;
            h -= zu * zv;
        }
        z += std::exp(-beta * h);
    }
    return z;
}

} // namespace qmcs
