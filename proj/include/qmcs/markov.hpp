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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmcs/core.hpp"
#include "qmcs/gibbs.hpp"

namespace qmcs {

inline constexpr std::size_t kMaxDenseStates = 4096;

/**
 * Row-stochastic chain stored as sparse rows, with its stationary law.
 */
struct MarkovChain {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::vector<double> pi;
    bool lazy = false;

    [[nodiscard]] std::size_t size() const { return rows.size(); }

    [[nodiscard]] Eigen::MatrixXd dense() const {
        require(size() <= kMaxDenseStates, "chain: dense form capped at 4096 states");
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t x = 0; x < size(); ++x) {
            for (const auto &[y, p] : rows[x]) {
                P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += p;
            }
        }
        return P;
    }

    /// (P + I)/2, same stationary law.
    [[nodiscard]] MarkovChain make_lazy() const {
        MarkovChain c = *this;
        c.lazy = true;
        for (std::size_t x = 0; x < size(); ++x) {
            std::map<std::size_t, double> acc;
            for (const auto &[y, p] : rows[x]) {
                acc[y] += 0.5 * p;
            }
            acc[x] += 0.5;
            c.rows[x].assign(acc.begin(), acc.end());
        }
        return c;
    }

    /// Stationary law of a dense stochastic matrix, solved directly.
    static MarkovChain from_matrix(const Eigen::MatrixXd &P) {
        require(P.rows() == P.cols() && P.rows() >= 1, "chain: matrix must be square");
        const auto n = P.rows();
        MarkovChain c;
        c.rows.resize(static_cast<std::size_t>(n));
        for (Eigen::Index x = 0; x < n; ++x) {
            double s = 0.0;
            for (Eigen::Index y = 0; y < n; ++y) {
                require(P(x, y) >= 0.0, "chain: negative transition probability");
                s += P(x, y);
                if (P(x, y) > 0.0) {
                    c.rows[static_cast<std::size_t>(x)].emplace_back(static_cast<std::size_t>(y), P(x, y));
                }
            }
            require(std::abs(s - 1.0) <= 1e-10, "chain: rows must sum to 1");
        }
        Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
        A.row(n - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(n - 1) = 1.0;
        const Eigen::VectorXd pi = A.fullPivLu().solve(b);
        c.pi.assign(pi.data(), pi.data() + n);
        return c;
    }
};

/**
 * Heat-bath single-site dynamics for the Ising and colouring models: pick
 * a vertex uniformly and resample its value from the conditional law.
 *
 * @throws std::invalid_argument for matching models.
 */
inline MarkovChain glauber_chain(const GibbsModel &m, double beta) {
    require(m.kind != ModelKind::matching, "glauber_chain: use matching_chain for matchings");
    require(beta >= 0.0, "glauber_chain: beta must be >= 0");
    const int n = m.graph.n_vertices;
    MarkovChain c;
    c.pi = gibbs_distribution(m, beta);
    c.rows.resize(m.size());
    std::vector<std::uint64_t> stride(static_cast<std::size_t>(n));
    std::uint64_t s = 1;
    for (int v = 0; v < n; ++v) {
        stride[static_cast<std::size_t>(v)] = s;
        s *= static_cast<std::uint64_t>(m.q);
    }
    std::vector<std::size_t> targets(static_cast<std::size_t>(m.q));
    std::vector<double> weights(static_cast<std::size_t>(m.q));
    for (std::size_t x = 0; x < m.size(); ++x) {
        std::map<std::size_t, double> acc;
        for (int v = 0; v < n; ++v) {
            const int old = m.site(m.codes[x], v);
            int e_min = m.max_energy + 1;
            for (int col = 0; col < m.q; ++col) {
                const std::uint64_t code = m.codes[x] - static_cast<std::uint64_t>(old) * stride[static_cast<std::size_t>(v)] +
                                           static_cast<std::uint64_t>(col) * stride[static_cast<std::size_t>(v)];
                targets[static_cast<std::size_t>(col)] = m.index_of(code);
                e_min = std::min(e_min, m.energy[targets[static_cast<std::size_t>(col)]]);
            }
            double total = 0.0;
            for (int col = 0; col < m.q; ++col) {
                const auto i = static_cast<std::size_t>(col);
                weights[i] = boltzmann_weight(beta, m.energy[targets[i]] - e_min);
                total += weights[i];
            }
            for (int col = 0; col < m.q; ++col) {
                const auto i = static_cast<std::size_t>(col);
                acc[targets[i]] += weights[i] / (total * n);
            }
        }
        c.rows[x].assign(acc.begin(), acc.end());
    }
    return c;
}

/**
 * Metropolis add/remove dynamics on matchings: pick an edge uniformly,
 * remove it if present, add it w.p. min(1, e^{-beta}) if both ends are free.
 */
inline MarkovChain matching_chain(const GibbsModel &m, double beta) {
    require(m.kind == ModelKind::matching, "matching_chain: needs a matching model");
    require(beta >= 0.0, "matching_chain: beta must be >= 0");
    MarkovChain c;
    c.pi = gibbs_distribution(m, beta);
    c.rows.resize(m.size());
    const auto ne = m.graph.n_edges();
    const double accept_add = boltzmann_weight(beta, 1);
    for (std::size_t x = 0; x < m.size(); ++x) {
        if (ne == 0) {
            c.rows[x] = {{x, 1.0}};
            continue;
        }
        const std::uint64_t mask = m.codes[x];
        std::uint64_t covered = 0;
        for (std::size_t e = 0; e < ne; ++e) {
            if ((mask >> e) & 1U) {
                covered |= (std::uint64_t{1} << m.graph.edges[e].first) |
                           (std::uint64_t{1} << m.graph.edges[e].second);
            }
        }
        std::map<std::size_t, double> acc;
        const double pe = 1.0 / static_cast<double>(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            const std::uint64_t bit = std::uint64_t{1} << e;
            const std::uint64_t ends = (std::uint64_t{1} << m.graph.edges[e].first) |
                                       (std::uint64_t{1} << m.graph.edges[e].second);
            if (mask & bit) {
                acc[m.index_of(mask & ~bit)] += pe;
            } else if ((covered & ends) == 0) {
                acc[m.index_of(mask | bit)] += pe * accept_add;
                acc[x] += pe * (1.0 - accept_add);
            } else {
                acc[x] += pe;
            }
        }
        c.rows[x].assign(acc.begin(), acc.end());
    }
    return c;
}

/// The chain natural to a model: Glauber for spins/colours, Metropolis for matchings.
inline MarkovChain model_chain(const GibbsModel &m, double beta) {
    return m.kind == ModelKind::matching ? matching_chain(m, beta) : glauber_chain(m, beta);
}

struct StationarityReport {
    double row_sum_residual;
    double stationarity_residual;
    double reversibility_residual;
};

inline StationarityReport stationarity(const MarkovChain &c) {
    StationarityReport r{0.0, 0.0, 0.0};
    std::vector<double> piP(c.size(), 0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> flow;
    for (std::size_t x = 0; x < c.size(); ++x) {
        double s = 0.0;
        for (const auto &[y, p] : c.rows[x]) {
            s += p;
            piP[y] += c.pi[x] * p;
            flow[{x, y}] += c.pi[x] * p;
        }
        r.row_sum_residual = std::max(r.row_sum_residual, std::abs(s - 1.0));
    }
    for (std::size_t x = 0; x < c.size(); ++x) {
        r.stationarity_residual = std::max(r.stationarity_residual, std::abs(piP[x] - c.pi[x]));
    }
    for (const auto &[key, f] : flow) {
        const auto it = flow.find({key.second, key.first});
        const double back = it == flow.end() ? 0.0 : it->second;
        r.reversibility_residual = std::max(r.reversibility_residual, std::abs(f - back));
    }
    return r;
}

/**
 * Symmetrised matrix D^{1/2} P D^{-1/2} with D = diag(pi). For a reversible
 * chain this equals the discriminant sqrt(P(x,y) P(y,x)).
 */
inline Eigen::MatrixXd symmetrised(const MarkovChain &c) {
    Eigen::MatrixXd P = c.dense();
    const auto n = P.rows();
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            const double px = c.pi[static_cast<std::size_t>(x)];
            const double py = c.pi[static_cast<std::size_t>(y)];
            P(x, y) = (px > 0.0 && py > 0.0) ? P(x, y) * std::sqrt(px / py) : 0.0;
        }
    }
    return 0.5 * (P + P.transpose());
}

struct ChainSpectrum {
    std::vector<double> eigenvalues;
    double lambda1;
    double tau;
};

/**
 * Eigenvalues (descending), second-largest magnitude and relaxation time.
 *
 * @throws ContractViolation if the chain is not ergodic.
 */
inline ChainSpectrum chain_spectrum(const MarkovChain &c) {
    require(std::all_of(c.pi.begin(), c.pi.end(), [](double p) { return p > 0.0; }),
            "chain_spectrum: stationary law must be positive");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrised(c));
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.rbegin(), ev.rend());
    double l1 = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        l1 = std::max(l1, std::abs(ev[i]));
    }
    if (l1 >= 1.0 - 1e-12) {
        throw ContractViolation("chain is not ergodic: |lambda_1| = 1");
    }
    return {ev, l1, 1.0 / (1.0 - l1)};
}

inline double relaxation_time(const MarkovChain &c) { return chain_spectrum(c).tau; }

/// Run the chain for `steps` transitions; each is charged as a walk step.
template <typename Rng_>
std::size_t mix_sample(const MarkovChain &c, std::size_t start, std::uint64_t steps,
                       Rng_ &rng, QueryLedger &ledger) {
    require(start < c.size(), "mix_sample: start state out of range");
    std::size_t x = start;
    for (std::uint64_t s = 0; s < steps; ++s) {
        const double u = rng.uniform();
        double acc = 0.0;
        const auto &row = c.rows[x];
        std::size_t next = row.back().first;
        for (const auto &[y, p] : row) {
            acc += p;
            if (u < acc) {
                next = y;
                break;
            }
        }
        x = next;
    }
    ledger.walk_steps += steps;
    return x;
}

/// Exact law after `steps` transitions from the law `dist`.
inline std::vector<double> evolve(const MarkovChain &c, std::vector<double> dist,
                                  std::uint64_t steps) {
    require(dist.size() == c.size(), "evolve: size mismatch");
    for (std::uint64_t s = 0; s < steps; ++s) {
        std::vector<double> next(c.size(), 0.0);
        for (std::size_t x = 0; x < c.size(); ++x) {
            if (dist[x] == 0.0) {
                continue;
            }
            for (const auto &[y, p] : c.rows[x]) {
                next[y] += dist[x] * p;
            }
        }
        dist = std::move(next);
    }
    return dist;
}

/// Step count tau ln(1/(eps pi_min)) for an eps-close classical sample.
inline std::uint64_t mixing_steps(double tau, double eps, double pi_min) {
    return static_cast<std::uint64_t>(std::ceil(tau * std::log(1.0 / (eps * pi_min))));
}

inline double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
    require(p.size() == q.size(), "total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

} // namespace qmcs
