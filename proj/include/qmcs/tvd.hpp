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
 * Total variation distance between two explicit distributions, estimated by
 * amplitude-estimating p(x) and q(x) at a point x drawn from (p + q)/2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmcs/amplitude_estimation.hpp"
#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/mean_estimation.hpp"
#include "qmcs/powering.hpp"

namespace qmcs {

namespace detail {

inline void check_probability_vector(const std::vector<double> &p, const char *what) {
    require(!p.empty(), std::string(what) + ": empty distribution");
    double s = 0.0;
    for (double v : p) {
        require(std::isfinite(v) && v >= 0.0, std::string(what) + ": bad probability");
        s += v;
    }
    require(std::abs(s - 1.0) <= 1e-9, std::string(what) + ": probabilities must sum to 1");
}

inline double ratio_value(double a, double b) {
    const double s = a + b;
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

} // namespace detail

/// Half the l1 distance between p and q.
inline double exact_tvd(const std::vector<double> &p, const std::vector<double> &q) {
    require(p.size() == q.size(), "exact_tvd: index sets differ");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

struct TvdInstance {
    std::vector<double> p;
    std::vector<double> q;
    std::vector<double> r;
    double epsilon = 0.0;
    std::int64_t t = 0;

    /// @throws std::invalid_argument on invalid inputs or eps outside (0, 1).
    static TvdInstance make(std::vector<double> p, std::vector<double> q, double eps) {
        require(p.size() == q.size(), "tvd: index sets differ");
        detail::check_probability_vector(p, "tvd p");
        detail::check_probability_vector(q, "tvd q");
        require(eps > 0.0 && eps < 1.0, "tvd: eps must be in (0, 1)");
        TvdInstance inst;
        inst.r.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            inst.r[i] = (p[i] + q[i]) / 2.0;
        }
        inst.p = std::move(p);
        inst.q = std::move(q);
        inst.epsilon = eps;
        inst.t = static_cast<std::int64_t>(
            std::ceil(20.0 * kPi * std::sqrt(static_cast<double>(inst.r.size()) / eps)));
        return inst;
    }

    [[nodiscard]] std::size_t n() const { return r.size(); }
};

/**
 * Exact law of the median of `reps` iid draws from d.
 *
 * P(median <= v) = P(Bin(reps, F(v)) >= (reps + 1)/2).
 */
inline ValueDistribution median_law(const ValueDistribution &d, int reps) {
    require(reps >= 1 && reps % 2 == 1, "median_law: reps must be odd");
    if (reps == 1) {
        return d;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(d.size());
    double cdf = 0.0;
    double prev = 0.0;
    for (const auto &o : d.support()) {
        cdf = std::min(1.0, cdf + o.prob);
        const double g = binomial_upper_tail(reps, cdf, (reps + 1) / 2);
        out.emplace_back(o.value, std::max(0.0, g - prev));
        prev = g;
    }
    out.back().second += std::max(0.0, 1.0 - prev);
    return ValueDistribution::from_law(out);
}

/// Per-x contribution to the subroutine: r(x), d(x) and E[d~(x)].
struct TvdTerm {
    double r;
    double d;
    double expected;
};

namespace detail {

inline constexpr double kTvdPrune = 1e-18;

inline std::vector<Outcome> pruned(const ValueDistribution &d) {
    std::vector<Outcome> out;
    for (const auto &o : d.support()) {
        if (o.prob > kTvdPrune) {
            out.push_back(o);
        }
    }
    return out;
}

/// Calls f(value, prob) over the joint law of the two estimates at x.
template <typename F>
void for_each_pair(const TvdInstance &inst, std::size_t x, int reps, F f) {
    const auto pl = pruned(median_law(ae_outcome_distribution(inst.p[x], inst.t), reps));
    const auto ql = pruned(median_law(ae_outcome_distribution(inst.q[x], inst.t), reps));
    for (const auto &a : pl) {
        for (const auto &b : ql) {
            const double w = a.prob * b.prob;
            if (w > kTvdPrune) {
                f(ratio_value(a.value, b.value), w);
            }
        }
    }
}

} // namespace detail

/// Exact per-x terms of the subroutine; x with r(x) = 0 is never drawn.
inline std::vector<TvdTerm> tvd_subroutine_terms(const TvdInstance &inst, int reps = 1) {
    std::vector<TvdTerm> terms;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        if (inst.r[x] == 0.0) {
            continue;
        }
        double m = 0.0;
        double mass = 0.0;
        detail::for_each_pair(inst, x, reps, [&](double v, double w) {
            m += v * w;
            mass += w;
        });
        terms.push_back({inst.r[x], detail::ratio_value(inst.p[x], inst.q[x]), m / mass});
    }
    return terms;
}

/**
 * Exact output law of the subroutine: x ~ r, then |p~ - q~|/(p~ + q~) with
 * each estimate the median of `reps` amplitude-estimation shots. An output
 * of 0/0 is reported as 0.
 */
inline ValueDistribution tvd_subroutine_distribution(const TvdInstance &inst, int reps = 1) {
    require(inst.t >= 1, "tvd_subroutine_distribution: t must be >= 1");
    std::map<double, double> merged;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        if (inst.r[x] == 0.0) {
            continue;
        }
        detail::for_each_pair(inst, x, reps,
                              [&](double v, double w) { merged[v] += inst.r[x] * w; });
    }
    std::vector<std::pair<double, double>> pairs(merged.begin(), merged.end());
    return ValueDistribution::from_law(pairs);
}

struct TvdEstimate {
    Estimate estimate;
    std::int64_t t_inner = 0;
    int reps_inner = 0;
    std::int64_t t_outer = 0;
    double subroutine_mean = 0.0;
    /// Amplitude-estimation iterations spent inside subroutine calls.
    std::uint64_t ae_iterations = 0;
};

/**
 * Estimate ||p - q|| to within eps w.p. >= 1 - delta.
 *
 * The subroutine runs at internal accuracy eps/8, each probability being the
 * median of enough shots to fail w.p. <= eps/8. Its mean is then estimated
 * to eps/2 by the bounded estimator.
 *
 * @throws std::invalid_argument on invalid inputs.
 */
template <typename Rng_>
TvdEstimate estimate_tvd(const std::vector<double> &p, const std::vector<double> &q,
                         double eps, double delta, Rng_ &rng, QueryLedger &ledger,
                         const EstimatorConstants &k = {}) {
    require(eps > 0.0 && eps < 1.0, "estimate_tvd: eps must be in (0, 1)");
    require(delta > 0.0 && delta < 1.0, "estimate_tvd: delta must be in (0, 1)");
    const double inner = eps / 8.0;
    const auto inst = TvdInstance::make(p, q, inner);
    TvdEstimate out;
    out.t_inner = inst.t;
    out.reps_inner = median_reps(kAeFailure, inner);
    out.t_outer = iterations_for_accuracy(eps / 2.0, k.C);
    const auto law = tvd_subroutine_distribution(inst, out.reps_inner);
    out.subroutine_mean = law.mean();
    out.estimate = estimate_mean_bounded(law, out.t_outer, delta, rng, ledger, k);
    out.estimate.target_error = eps;
    const QueryLedger &l = out.estimate.ledger;
    const std::uint64_t calls = 2 * l.reflection_uses + l.a_uses + l.a_inv_uses;
    out.ae_iterations = calls * 2 * static_cast<std::uint64_t>(out.reps_inner) *
                        static_cast<std::uint64_t>(out.t_inner);
    return out;
}

struct StabilityCheck {
    double gap;
    double bound;
    bool holds;
};

/**
 * Compare f(p, q) = |p - q|/(p + q) against f(p~, q~) under the relative
 * perturbation |p - p~|, |q - q~| <= eta (p + q).
 *
 * @throws std::invalid_argument when the perturbation is not admissible.
 */
inline StabilityCheck ratio_stability_check(double p, double q, double p_t, double q_t,
                                            double eta) {
    require(eta >= 0.0 && eta <= 0.2, "ratio_stability_check: eta must be in [0, 1/5]");
    require(p >= 0.0 && q >= 0.0 && p_t >= 0.0 && q_t >= 0.0,
            "ratio_stability_check: values must be >= 0");
    const double slack = 1e-12 * (p + q);
    require(std::abs(p - p_t) <= eta * (p + q) + slack &&
                std::abs(q - q_t) <= eta * (p + q) + slack,
            "ratio_stability_check: perturbation exceeds eta (p + q)");
    const double gap =
        std::abs(detail::ratio_value(p, q) - detail::ratio_value(p_t, q_t));
    return {gap, 5.0 * eta, gap <= 5.0 * eta + 1e-12};
}

} // namespace qmcs
