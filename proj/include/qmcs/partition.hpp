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
 * Chebyshev cooling schedules and telescoping-product estimation of
 * partition functions.
 *
 * Forward schedules estimate Z(inf) = Z(0) prod Z(b_{i+1})/Z(b_i) by sampling
 * from the hotter end of each pair. Reversed schedules estimate
 * Z(0) = Z(inf) prod Z(b_i)/Z(b_{i+1}) by sampling from the colder end; the
 * final pair (b_{l-1}, inf) is estimated as its forward ratio and inverted.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/gibbs.hpp"
#include "qmcs/markov.hpp"
#include "qmcs/mean_estimation.hpp"
#include "qmcs/quantum_walk.hpp"

namespace qmcs {

enum class Direction { forward, reversed };

inline std::string to_string(Direction d) {
    return d == Direction::forward ? "forward" : "reversed";
}

struct CoolingSchedule {
    std::vector<double> betas;
    double B = 2.0;
    Direction direction = Direction::forward;

    [[nodiscard]] std::size_t ell() const { return betas.size() - 1; }
};

/// Y = e^{-(beta_j - beta_i) H} under pi_i; its mean is Z(beta_j)/Z(beta_i).
inline ValueDistribution ratio_variable(const GibbsModel &m, double beta_i, double beta_j) {
    require(std::isfinite(beta_i) && beta_i < beta_j, "ratio_variable: need finite beta_i < beta_j");
    const double z = exact_partition(m, beta_i);
    const double gap = beta_j - beta_i;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t e = 0; e < m.energy_counts.size(); ++e) {
        if (m.energy_counts[e] > 0.0) {
            const int E = static_cast<int>(e);
            pairs.emplace_back(boltzmann_weight(gap, E), m.energy_counts[e] * boltzmann_weight(beta_i, E) / z);
        }
    }
    return ValueDistribution::from_law(pairs);
}

/// Y = e^{(beta_j - beta_i) H} under pi_j; its mean is Z(beta_i)/Z(beta_j).
inline ValueDistribution reversed_ratio_variable(const GibbsModel &m, double beta_i, double beta_j) {
    require(std::isfinite(beta_j) && beta_i < beta_j,
            "reversed_ratio_variable: need beta_i < beta_j finite");
    const double z = exact_partition(m, beta_j);
    const double gap = beta_j - beta_i;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t e = 0; e < m.energy_counts.size(); ++e) {
        if (m.energy_counts[e] > 0.0) {
            const int E = static_cast<int>(e);
            pairs.emplace_back(std::exp(gap * E), m.energy_counts[e] * boltzmann_weight(beta_j, E) / z);
        }
    }
    return ValueDistribution::from_law(pairs);
}

/// Chebyshev ratio E[Y^2]/E[Y]^2 of the pair (beta_i, beta_j).
inline double chebyshev_ratio(const GibbsModel &m, double beta_i, double beta_j, Direction dir) {
    if (dir == Direction::forward || !std::isfinite(beta_j)) {
        const double zj = exact_partition(m, beta_j);
        return exact_partition(m, 2.0 * beta_j - beta_i) * exact_partition(m, beta_i) / (zj * zj);
    }
    const double zi = exact_partition(m, beta_i);
    return exact_partition(m, 2.0 * beta_i - beta_j) * exact_partition(m, beta_j) / (zi * zi);
}

struct PairCheck {
    double beta_i;
    double beta_j;
    double ratio;
    double chi2_definitional;
    double overlap_squared;
    bool passes;
};

struct ScheduleReport {
    std::vector<PairCheck> pairs;
    bool all_pass = true;
};

/// Per-pair Chebyshev ratio, chi-squared and overlap checks.
inline ScheduleReport verify_schedule(const GibbsModel &m, const CoolingSchedule &s) {
    ScheduleReport rep;
    bool ordered = s.betas.size() >= 2 && s.betas.front() == 0.0 && s.betas.back() == kInfinity;
    for (std::size_t i = 0; i + 1 < s.betas.size(); ++i) {
        ordered = ordered && s.betas[i] < s.betas[i + 1];
    }
    rep.all_pass = ordered;
    for (std::size_t i = 0; ordered && i + 1 < s.betas.size(); ++i) {
        const double a = s.betas[i];
        const double b = s.betas[i + 1];
        PairCheck pc{a, b, chebyshev_ratio(m, a, b, s.direction), 0.0, overlap_squared(m, a, b), false};
        if (s.direction == Direction::forward || !std::isfinite(b)) {
            pc.chi2_definitional = chi_squared(m, a, b).definitional;
        } else {
            const auto pa = gibbs_distribution(m, a);
            const auto pb = gibbs_distribution(m, b);
            for (std::size_t x = 0; x < m.size(); ++x) {
                const double r = pa[x] / pb[x] - 1.0;
                pc.chi2_definitional += pb[x] * r * r;
            }
        }
        pc.passes = std::isfinite(pc.ratio) && pc.ratio <= s.B * (1.0 + 1e-12) &&
                    pc.overlap_squared >= 1.0 / s.B - 1e-12;
        rep.all_pass = rep.all_pass && pc.passes;
        rep.pairs.push_back(pc);
    }
    return rep;
}

/**
 * Greedy schedule from the exact oracle: at each beta take infinity if the
 * terminal pair passes, otherwise the largest next beta in (beta, 1e6] found
 * by 60 bisection steps.
 *
 * @throws std::invalid_argument if B <= 1.
 * @throws ContractViolation if Z(inf) = 0 or the greedy walk stalls.
 */
inline CoolingSchedule build_schedule(const GibbsModel &m, double B, Direction dir) {
    require(B > 1.0, "build_schedule: B must be > 1");
    if (!(exact_partition(m, kInfinity) >= 1.0)) {
        throw ContractViolation("build_schedule: Z(inf) < 1, no zero-energy state");
    }
    constexpr double kBetaCap = 1e6;
    CoolingSchedule s{{0.0}, B, dir};
    const auto feasible = [&](double a, double b) {
        const double r = chebyshev_ratio(m, a, b, dir);
        return std::isfinite(r) && r <= B;
    };
    for (int step = 0; step < 10000; ++step) {
        const double beta = s.betas.back();
        if (feasible(beta, kInfinity)) {
            s.betas.push_back(kInfinity);
            if (!verify_schedule(m, s).all_pass) {
                throw ContractViolation("build_schedule: constructed schedule fails verification");
            }
            return s;
        }
        double lo = beta;
        double hi = kBetaCap;
        if (feasible(beta, hi)) {
            lo = hi;
        } else {
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(beta, mid) ? lo : hi) = mid;
            }
        }
        if (!(lo > beta)) {
            throw ContractViolation("build_schedule: greedy search stalled");
        }
        s.betas.push_back(lo);
    }
    throw ContractViolation("build_schedule: too many steps");
}

enum class PartitionMode { ideal_sampling, walk_idealized, walk_exact_sim };

inline std::string to_string(PartitionMode m) {
    switch (m) {
    case PartitionMode::ideal_sampling:
        return "ideal_sampling";
    case PartitionMode::walk_idealized:
        return "walk_idealized";
    case PartitionMode::walk_exact_sim:
        return "walk_exact_sim";
    }
    return "?";
}

struct PartitionOptions {
    EstimatorConstants constants{};
    double c_r = 1.0;
    double c_s = 1.0;
    double walk_failure = 1.0 / 12.0;
};

struct RatioDiagnostics {
    double beta_i;
    double beta_j;
    double estimate;
    double exact;
    double sample_beta;
    QueryLedger ledger;
    std::uint64_t corrupted_runs = 0;
};

struct PartitionEstimate {
    double z_value = 0.0;
    double anchor = 0.0;
    double target_beta = 0.0;
    std::vector<double> ratios;
    std::vector<RatioDiagnostics> diagnostics;
    double epsilon = 0.0;
    double delta = 0.0;
    QueryLedger ledger;
};

/// Exact ratios and anchor, for the telescoping identity.
struct Telescope {
    double anchor;
    std::vector<double> ratios;
    double target;
};

inline Telescope exact_telescope(const GibbsModel &m, const CoolingSchedule &s) {
    Telescope t{0.0, {}, 0.0};
    for (std::size_t i = 0; i + 1 < s.betas.size(); ++i) {
        const double zi = exact_partition(m, s.betas[i]);
        const double zj = exact_partition(m, s.betas[i + 1]);
        t.ratios.push_back(s.direction == Direction::forward ? zj / zi : zi / zj);
    }
    if (s.direction == Direction::forward) {
        t.anchor = exact_partition(m, 0.0);
        t.target = exact_partition(m, kInfinity);
    } else {
        t.anchor = exact_partition(m, kInfinity);
        t.target = exact_partition(m, 0.0);
    }
    return t;
}

namespace detail {

/// What to sample for pair i: the variable, the beta it is drawn at, and
/// whether the estimate must be inverted.
struct RatioPlan {
    ValueDistribution variable;
    double sample_beta;
    std::size_t sample_index;
    bool invert;
};

inline RatioPlan ratio_plan(const GibbsModel &m, const CoolingSchedule &s, std::size_t i) {
    const double a = s.betas[i];
    const double b = s.betas[i + 1];
    if (s.direction == Direction::forward) {
        return {ratio_variable(m, a, b), a, i, false};
    }
    if (!std::isfinite(b)) {
        return {ratio_variable(m, a, b), a, i, true};
    }
    return {reversed_ratio_variable(m, a, b), b, i + 1, false};
}

struct WalkCosts {
    double tau = 1.0;
    std::uint64_t prep_steps = 0;
    double warm_error = 0.0;
    double gap = 0.5;
    std::vector<double> discriminant;
};

} // namespace detail

/**
 * Telescoping-product estimate of Z at the far end of the schedule.
 *
 * Each ratio is estimated by the relative-error estimator at accuracy
 * eps/(2l) (eps/(4l) before inversion for the reversed terminal pair) and
 * amplified to failure delta/l. Walk modes also charge state preparation and
 * reflection costs; walk_exact_sim additionally corrupts each run with
 * probability R eps_r + eps_s using the realized errors.
 *
 * @throws ContractViolation if the schedule fails verification.
 */
template <typename Rng_>
PartitionEstimate estimate_partition(const GibbsModel &m, const CoolingSchedule &s, double eps,
                                     double delta, PartitionMode mode, Rng_ &rng,
                                     QueryLedger &ledger, const PartitionOptions &opt = {}) {
    require(eps > 0.0 && eps < 1.0, "estimate_partition: eps must be in (0, 1)");
    require(delta > 0.0 && delta < 1.0, "estimate_partition: delta must be in (0, 1)");
    if (!verify_schedule(m, s).all_pass) {
        throw ContractViolation("estimate_partition: schedule fails verification");
    }
    const QueryLedger before = ledger;
    const std::size_t ell = s.ell();
    const auto exact = exact_telescope(m, s);
    PartitionEstimate out;
    out.anchor = exact.anchor;
    out.target_beta = s.direction == Direction::forward ? kInfinity : 0.0;
    out.epsilon = eps;
    out.delta = delta;
    const double gamma = opt.walk_failure;
    const double run_failure = mode == PartitionMode::walk_exact_sim ? 0.25 + 2.0 * gamma : 0.25;
    std::map<std::size_t, detail::WalkCosts> costs;
    const auto walk_costs = [&](std::size_t idx, double beta) -> const detail::WalkCosts & {
        auto it = costs.find(idx);
        if (it != costs.end()) {
            return it->second;
        }
        detail::WalkCosts wc;
        const auto chain = model_chain(m, beta);
        const auto spec = chain_spectrum(chain);
        wc.tau = spec.tau;
        wc.gap = phase_gap_turns(chain);
        wc.discriminant = spec.eigenvalues;
        wc.discriminant.erase(wc.discriminant.begin());
        QueryLedger prep;
        const ReflectionMode rm = mode == PartitionMode::walk_exact_sim ? ReflectionMode::exact_sim
                                                                        : ReflectionMode::idealized;
        const auto ws = warm_start_prepare(m, s.betas, idx, gamma, rm, prep, {opt.c_s, s.B});
        wc.prep_steps = prep.walk_steps;
        wc.warm_error = ws.error;
        return costs.emplace(idx, wc).first->second;
    };
    double product = 1.0;
    for (std::size_t i = 0; i < ell; ++i) {
        const auto plan = detail::ratio_plan(m, s, i);
        const double acc = plan.invert ? eps / (4.0 * ell) : eps / (2.0 * ell);
        const QueryLedger ratio_before = ledger;
        RatioDiagnostics diag{s.betas[i], s.betas[i + 1], 0.0, exact.ratios[i], plan.sample_beta, {}, 0};
        const auto one_run = [&]() {
            const QueryLedger run_before = ledger;
            Estimate e = estimate_mean_relative(plan.variable, s.B, acc, rng, ledger, opt.constants);
            if (mode == PartitionMode::ideal_sampling) {
                return e;
            }
            const auto &wc = walk_costs(plan.sample_index, plan.sample_beta);
            const QueryLedger used = ledger.since(run_before);
            const std::uint64_t R = std::max<std::uint64_t>(used.reflection_uses, 1);
            const double eps_r = gamma / static_cast<double>(R);
            const std::uint64_t preps = used.state_copies + used.classical_samples;
            if (mode == PartitionMode::walk_idealized) {
                const auto per_reflection = static_cast<std::uint64_t>(
                    std::ceil(opt.c_r * std::sqrt(wc.tau) * std::log(1.0 / eps_r)));
                ledger.walk_steps = checked_cost(
                    used.reflection_uses, per_reflection,
                    checked_cost(preps, wc.prep_steps, ledger.walk_steps));
            } else {
                const int b = ancilla_bits(wc.gap, eps_r);
                const std::uint64_t M = std::uint64_t{1} << b;
                double realized = 0.0;
                for (const double l : wc.discriminant) {
                    realized = std::max(realized, 2.0 * fejer_amplitude(std::acos(std::clamp(l, -1.0, 1.0)), M));
                }
                ledger.walk_steps = checked_cost(
                    used.reflection_uses, 2 * (M - 1),
                    checked_cost(preps, wc.prep_steps, ledger.walk_steps));
                const double corrupt = std::min(1.0, static_cast<double>(R) * realized + wc.warm_error);
                if (rng.uniform() < corrupt) {
                    ++diag.corrupted_runs;
                    e.value = 0.0;
                }
            }
            e.ledger = ledger.since(run_before);
            return e;
        };
        double est = power_median(one_run, run_failure, delta / static_cast<double>(ell)).value;
        if (plan.invert) {
            if (est <= 0.0) {
                throw ContractViolation("estimate_partition: terminal ratio estimate is not positive");
            }
            est = 1.0 / est;
        }
        diag.estimate = est;
        diag.ledger = ledger.since(ratio_before);
        out.ratios.push_back(est);
        out.diagnostics.push_back(diag);
        product *= est;
    }
    out.z_value = exact.anchor * product;
    out.ledger = ledger.since(before);
    return out;
}

enum class BaselineSampling { exact, mixing };

/// Samples per ratio for the classical product estimator.
inline std::uint64_t dyer_frieze_samples(double B, std::size_t ell, double eps) {
    return static_cast<std::uint64_t>(std::ceil(16.0 * B * static_cast<double>(ell) / (eps * eps)));
}

/**
 * Classical product estimator: each ratio is the average of 16 B l / eps^2
 * samples, drawn exactly or by running the chain tau ln(100/pi_min) steps
 * between draws.
 */
template <typename Rng_>
PartitionEstimate classical_baseline(const GibbsModel &m, const CoolingSchedule &s, double eps,
                                     Rng_ &rng, QueryLedger &ledger,
                                     BaselineSampling sampling = BaselineSampling::exact) {
    require(eps > 0.0 && eps < 1.0, "classical_baseline: eps must be in (0, 1)");
    if (!verify_schedule(m, s).all_pass) {
        throw ContractViolation("classical_baseline: schedule fails verification");
    }
    const QueryLedger before = ledger;
    const auto exact = exact_telescope(m, s);
    const std::size_t ell = s.ell();
    const auto n = dyer_frieze_samples(s.B, ell, eps);
    PartitionEstimate out;
    out.anchor = exact.anchor;
    out.target_beta = s.direction == Direction::forward ? kInfinity : 0.0;
    out.epsilon = eps;
    out.delta = 0.25;
    double product = 1.0;
    for (std::size_t i = 0; i < ell; ++i) {
        const auto plan = detail::ratio_plan(m, s, i);
        const QueryLedger ratio_before = ledger;
        double sum = 0.0;
        if (sampling == BaselineSampling::exact) {
            for (std::uint64_t k = 0; k < n; ++k) {
                sum += classical_sample(plan.variable, rng, ledger);
            }
        } else {
            const auto chain = model_chain(m, plan.sample_beta);
            const double pi_min = *std::min_element(chain.pi.begin(), chain.pi.end());
            const auto steps = mixing_steps(relaxation_time(chain), 0.01, pi_min);
            const double gap = s.betas[i + 1] - s.betas[i];
            std::size_t x = 0;
            for (std::uint64_t k = 0; k < n; ++k) {
                x = mix_sample(chain, x, steps, rng, ledger);
                ++ledger.classical_samples;
                const int E = m.energy[x];
                sum += s.direction == Direction::forward || plan.invert ? boltzmann_weight(gap, E)
                                                                       : std::exp(gap * E);
            }
        }
        double est = sum / static_cast<double>(n);
        if (plan.invert) {
            if (est <= 0.0) {
                throw ZeroProxyMean("classical_baseline: no zero-energy samples drawn");
            }
            est = 1.0 / est;
        }
        out.ratios.push_back(est);
        out.diagnostics.push_back({s.betas[i], s.betas[i + 1], est, exact.ratios[i], plan.sample_beta,
                                   ledger.since(ratio_before), 0});
        product *= est;
    }
    out.z_value = exact.anchor * product;
    out.ledger = ledger.since(before);
    return out;
}

} // namespace qmcs
