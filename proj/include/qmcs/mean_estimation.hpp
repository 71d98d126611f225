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
#include <string>
#include <utility>
#include <vector>

#include "qmcs/amplitude_estimation.hpp"
#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/powering.hpp"

namespace qmcs {

/// Worst single-shot C over a dense (a, t) grid is about 5.06.
inline constexpr double kDefaultC = 5.1;

struct EstimatorConstants {
    double C = kDefaultC;
    double D = std::max(4.0 * kDefaultC, 10.0);

    static EstimatorConstants with_C(double c) {
        return {c, std::max(4.0 * c, 10.0)};
    }
};

enum class ErrorKind { additive, relative };

inline std::string to_string(ErrorKind k) {
    return k == ErrorKind::additive ? "additive" : "relative";
}

struct Estimate {
    double value = 0.0;
    double target_error = 0.0;
    ErrorKind error_kind = ErrorKind::additive;
    double confidence = 1.0;
    QueryLedger ledger;
};

/// Smallest t with C (1/t + 1/t^2) <= eps, enough for means in [0, 1].
inline std::int64_t iterations_for_accuracy(double eps, double C = kDefaultC) {
    require(eps > 0.0, "iterations_for_accuracy: eps must be > 0");
    auto t = static_cast<std::int64_t>(
        std::ceil((C + std::sqrt(C * C + 4.0 * C * eps)) / (2.0 * eps)));
    t = std::max<std::int64_t>(t - 2, 1);
    while (C * (1.0 / t + 1.0 / (static_cast<double>(t) * t)) > eps) {
        ++t;
    }
    return t;
}

struct L2Parameters {
    int k;
    std::int64_t t0;
};

/// k and t0 of the l2 estimator; t0 is rounded up to a multiple of 4 so the
/// amplitudes 0, 1/2 and 1 sit exactly on the phase grid.
inline L2Parameters l2_parameters(double eps, double D) {
    const double lg = std::log2(1.0 / eps);
    const int k = static_cast<int>(std::ceil(lg));
    auto t0 = static_cast<std::int64_t>(std::ceil(D * std::sqrt(lg) / eps));
    t0 = (t0 + 3) / 4 * 4;
    return {k, t0};
}

/**
 * Median-of-runs amplification for an estimator failing w.p. gamma.
 *
 * run() must return an Estimate; ledgers are summed and the median value is
 * returned with confidence 1 - delta.
 */
template <typename Run>
Estimate power_median(Run &&run, double gamma, double delta) {
    const int reps = median_reps(gamma, delta);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(reps));
    Estimate out;
    for (int i = 0; i < reps; ++i) {
        Estimate e = run();
        values.push_back(e.value);
        out.ledger += e.ledger;
        out.target_error = e.target_error;
        out.error_kind = e.error_kind;
    }
    out.value = median_of(values);
    out.confidence = 1.0 - delta;
    return out;
}

/**
 * Bounded-output estimator: median of amplitude-estimation shots on
 * a = E[v], with t iterations each.
 *
 * @throws std::invalid_argument if the support leaves [0, 1].
 */
template <typename Rng_>
Estimate estimate_mean_bounded(const ValueDistribution &d, std::int64_t t,
                               double delta, Rng_ &rng, QueryLedger &ledger,
                               const EstimatorConstants &k = {}) {
    require(d.min_value() >= 0.0 && d.max_value() <= 1.0,
            "estimate_mean_bounded: support must lie in [0, 1]");
    require(t >= 1, "estimate_mean_bounded: t must be >= 1");
    const QueryLedger before = ledger;
    const double a = std::clamp(d.mean(), 0.0, 1.0);
    const int reps = median_reps(kAeFailure, delta);
    Estimate e;
    e.value = ae_median(a, t, reps, rng, ledger);
    const double tt = static_cast<double>(t);
    e.target_error = k.C * (1.0 / tt + 1.0 / (tt * tt));
    e.confidence = 1.0 - delta;
    e.ledger = ledger.since(before);
    return e;
}

/**
 * Nonnegative estimator with bounded second moment: truncated dyadic
 * layers, each estimated by the bounded estimator. Succeeds w.p. >= 4/5 to
 * within eps (||v||_2 + 1)^2.
 *
 * @throws std::invalid_argument on negative support or eps outside (0, 1/2).
 */
template <typename Rng_>
Estimate estimate_mean_l2(const ValueDistribution &d, double eps, Rng_ &rng,
                          QueryLedger &ledger, const EstimatorConstants &k = {}) {
    require(d.min_value() >= 0.0, "estimate_mean_l2: support must be >= 0");
    require(eps > 0.0 && eps < 0.5, "estimate_mean_l2: eps must be in (0, 1/2)");
    const QueryLedger before = ledger;
    const auto p = l2_parameters(eps, k.D);
    double value = estimate_mean_bounded(truncate(d, TruncationMode::range, 0.0, 1.0),
                                         p.t0, 0.1, rng, ledger, k)
                       .value;
    const double layer_delta = 1.0 / (10.0 * p.k);
    for (int l = 1; l <= p.k; ++l) {
        const double hi = std::ldexp(1.0, l);
        const auto layer = scale(truncate(d, TruncationMode::range, hi / 2.0, hi), 1.0 / hi);
        value += hi * estimate_mean_bounded(layer, p.t0, layer_delta, rng, ledger, k).value;
    }
    Estimate e;
    e.value = value;
    const double l2 = d.moments().l2norm;
    e.target_error = eps * (l2 + 1.0) * (l2 + 1.0);
    e.confidence = 0.8;
    e.ledger = ledger.since(before);
    return e;
}

/**
 * Bounded-variance estimator. Succeeds w.p. >= 2/3 to within eps when
 * Var(v) <= sigma^2; the contract is void otherwise.
 *
 * @throws std::invalid_argument unless sigma > 0 and 0 < eps < 4 sigma.
 */
template <typename Rng_>
Estimate estimate_mean_variance(const ValueDistribution &d, double sigma,
                                double eps, Rng_ &rng, QueryLedger &ledger,
                                const EstimatorConstants &k = {}) {
    require(sigma > 0.0, "estimate_mean_variance: sigma must be > 0");
    require(eps > 0.0 && eps < 4.0 * sigma,
            "estimate_mean_variance: eps must be in (0, 4 sigma)");
    const QueryLedger before = ledger;
    const auto scaled = scale(d, 1.0 / sigma);
    const double m = classical_sample(scaled, rng, ledger);
    ledger.a_uses += 1;
    const auto shifted = transform(scaled, [m](double v) { return v - m; });
    const auto minus = transform(truncate(shifted, TruncationMode::below, 0.0),
                                 [](double v) { return -v / 4.0; });
    const auto plus = scale(truncate(shifted, TruncationMode::at_least, 0.0), 0.25);
    const double inner = eps / (32.0 * sigma);
    const auto half = [&](const ValueDistribution &part) {
        return power_median([&] { return estimate_mean_l2(part, inner, rng, ledger, k); },
                            0.2, 1.0 / 9.0);
    };
    const double mu_minus = half(minus).value;
    const double mu_plus = half(plus).value;
    Estimate e;
    e.value = sigma * (m - 4.0 * mu_minus + 4.0 * mu_plus);
    e.target_error = eps;
    e.confidence = 2.0 / 3.0;
    e.ledger = ledger.since(before);
    return e;
}

/**
 * Relative-error estimator for nonnegative outputs with
 * Var(v)/E[v]^2 <= B. Fails w.p. <= 1/4.
 *
 * @throws ZeroProxyMean if every proxy sample is zero.
 */
template <typename Rng_>
Estimate estimate_mean_relative(const ValueDistribution &d, double B, double eps,
                                Rng_ &rng, QueryLedger &ledger,
                                const EstimatorConstants &k = {}) {
    require(d.min_value() >= 0.0, "estimate_mean_relative: support must be >= 0");
    require(B >= 1.0, "estimate_mean_relative: B must be >= 1");
    require(eps > 0.0 && eps < 27.0 * B / 4.0,
            "estimate_mean_relative: eps must be in (0, 27B/4)");
    const double inner = 2.0 * eps / (3.0 * std::pow(2.0 * std::sqrt(B) + 1.0, 2));
    require(inner < 0.5, "estimate_mean_relative: eps too large for this B");
    const QueryLedger before = ledger;
    const auto n = static_cast<int>(std::ceil(32.0 * B));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += classical_sample(d, rng, ledger);
        ledger.a_uses += 1;
    }
    const double m = sum / n;
    if (m == 0.0) {
        throw ZeroProxyMean("estimate_mean_relative: all proxy samples were zero");
    }
    const auto rescaled = scale(d, 1.0 / m);
    const double ratio =
        power_median([&] { return estimate_mean_l2(rescaled, inner, rng, ledger, k); },
                     0.2, 1.0 / 8.0)
            .value;
    Estimate e;
    e.value = m * ratio;
    e.target_error = eps;
    e.error_kind = ErrorKind::relative;
    e.confidence = 0.75;
    e.ledger = ledger.since(before);
    return e;
}

/// Sample count for the classical Chebyshev estimator.
inline std::uint64_t chebyshev_samples(double sigma, double eps, double delta) {
    return static_cast<std::uint64_t>(std::ceil(sigma * sigma / (eps * eps * delta)));
}

/// Classical baseline: empirical mean of sigma^2/(eps^2 delta) draws.
template <typename Rng_>
Estimate classical_mean_chebyshev(const ValueDistribution &d, double sigma,
                                  double eps, double delta, Rng_ &rng,
                                  QueryLedger &ledger) {
    require(sigma > 0.0 && eps > 0.0 && delta > 0.0 && delta < 1.0,
            "classical_mean_chebyshev: invalid parameters");
    const QueryLedger before = ledger;
    const auto n = chebyshev_samples(sigma, eps, delta);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        sum += classical_sample(d, rng, ledger);
    }
    Estimate e;
    e.value = sum / static_cast<double>(n);
    e.target_error = eps;
    e.confidence = 1.0 - delta;
    e.ledger = ledger.since(before);
    return e;
}

} // namespace qmcs
