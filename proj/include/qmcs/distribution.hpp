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
#include <map>
#include <utility>
#include <vector>

#include "qmcs/core.hpp"

namespace qmcs {

struct Outcome {
    double value;
    double prob;
};

struct Moments {
    double mean;
    double variance;
    double l2norm;
};

enum class TruncationMode { below, range, at_least };

/**
 * A finite-support real random variable: the output law of an algorithm.
 *
 * Support is sorted ascending with distinct values. Immutable once built.
 */
class ValueDistribution {
  public:
    /**
     * Build from (value, prob) pairs. Duplicate values are merged by exact
     * equality; a total within 1e-9 of one is renormalised.
     *
     * @throws std::invalid_argument on empty input, negative or non-finite
     *   probabilities, non-finite values, or a total off by more than 1e-9.
     */
    static ValueDistribution from_pairs(
        const std::vector<std::pair<double, double>> &pairs) {
        return build(pairs, 1e-9);
    }

    static ValueDistribution point_mass(double value) {
        return from_pairs({{value, 1.0}});
    }

    static ValueDistribution bernoulli(double p) {
        require(p >= 0.0 && p <= 1.0, "bernoulli: p must lie in [0, 1]");
        return from_pairs({{0.0, 1.0 - p}, {1.0, p}});
    }

    [[nodiscard]] const std::vector<Outcome> &support() const {
        return support_;
    }
    [[nodiscard]] std::size_t size() const { return support_.size(); }
    [[nodiscard]] double min_value() const { return support_.front().value; }
    [[nodiscard]] double max_value() const { return support_.back().value; }

    [[nodiscard]] Moments moments() const {
        double mean = 0.0;
        double second = 0.0;
        for (const auto &o : support_) {
            mean += o.prob * o.value;
            second += o.prob * o.value * o.value;
        }
        double var = 0.0;
        for (const auto &o : support_) {
            const double d = o.value - mean;
            var += o.prob * d * d;
        }
        return {mean, var, std::sqrt(second)};
    }

    [[nodiscard]] double mean() const { return moments().mean; }

    /// Probability mass on values v with pred(v).
    template <typename Pred>
    [[nodiscard]] double mass_where(Pred pred) const {
        double m = 0.0;
        for (const auto &o : support_) {
            if (pred(o.value)) {
                m += o.prob;
            }
        }
        return m;
    }

    /// Inverse-CDF draw without ledger charging.
    template <typename Rng_>
    double draw(Rng_ &rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative_.begin()), support_.size() - 1);
        return support_[idx].value;
    }

    /// Build from pairs that are already a probability vector up to
    /// rounding (used for derived laws).
    static ValueDistribution from_law(
        const std::vector<std::pair<double, double>> &pairs) {
        return build(pairs, 1e-6);
    }

  private:
    static ValueDistribution build(
        const std::vector<std::pair<double, double>> &pairs, double tolerance) {
        require(!pairs.empty(), "distribution: empty support");
        std::map<double, double> merged;
        double total = 0.0;
        for (const auto &[v, p] : pairs) {
            require(std::isfinite(v), "distribution: non-finite value");
            require(std::isfinite(p) && p >= 0.0,
                    "distribution: probabilities must be finite and >= 0");
            merged[v] += p;
            total += p;
        }
        require(std::abs(total - 1.0) <= tolerance,
                "distribution: probabilities must sum to 1");
        ValueDistribution d;
        double acc = 0.0;
        for (const auto &[v, p] : merged) {
            if (p == 0.0 && merged.size() > 1) {
                continue;
            }
            d.support_.push_back({v, p / total});
            acc += p / total;
            d.cumulative_.push_back(acc);
        }
        if (d.support_.empty()) {
            d.support_.push_back({merged.begin()->first, 1.0});
            d.cumulative_.push_back(1.0);
        }
        d.cumulative_.back() = 1.0;
        return d;
    }

    std::vector<Outcome> support_;
    std::vector<double> cumulative_;
};

/// Apply f to every value, merging equal images.
template <typename F>
ValueDistribution transform(const ValueDistribution &d, F f) {
    std::vector<std::pair<double, double>> out;
    out.reserve(d.size());
    for (const auto &o : d.support()) {
        const double v = f(o.value);
        require(std::isfinite(v), "transform: non-finite image");
        out.emplace_back(v, o.prob);
    }
    return ValueDistribution::from_law(out);
}

inline ValueDistribution scale(const ValueDistribution &d, double factor) {
    return transform(d, [factor](double v) { return v * factor; });
}

/**
 * Move the mass of values outside a window to zero.
 *
 * below keeps v < x; range keeps x <= v < y; at_least keeps v >= x.
 */
inline ValueDistribution truncate(const ValueDistribution &d,
                                  TruncationMode mode, double x,
                                  double y = 0.0) {
    require(std::isfinite(x), "truncate: bound must be finite");
    if (mode == TruncationMode::range) {
        require(std::isfinite(y) && x < y, "truncate: range needs x < y");
    }
    return transform(d, [&](double v) {
        switch (mode) {
        case TruncationMode::below:
            return v < x ? v : 0.0;
        case TruncationMode::range:
            return (x <= v && v < y) ? v : 0.0;
        case TruncationMode::at_least:
            return v >= x ? v : 0.0;
        }
        return 0.0;
    });
}

/// Metered draw: one classical use of the algorithm.
template <typename Rng_>
double classical_sample(const ValueDistribution &d, Rng_ &rng,
                        QueryLedger &ledger) {
    ++ledger.classical_samples;
    return d.draw(rng);
}

/// Total variation distance between two laws on the real line.
inline double tv_distance(const ValueDistribution &a, const ValueDistribution &b) {
    std::map<double, double> diff;
    for (const auto &o : a.support()) {
        diff[o.value] += o.prob;
    }
    for (const auto &o : b.support()) {
        diff[o.value] -= o.prob;
    }
    double s = 0.0;
    for (const auto &[v, p] : diff) {
        s += std::abs(p);
    }
    return 0.5 * s;
}

} // namespace qmcs
