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
#include <vector>

#include "qmcs/core.hpp"

namespace qmcs {

/// Per-run failure probability of a single amplitude-estimation shot.
inline const double kAeFailure = 1.0 - 8.0 / (kPi * kPi);

/// P[Bin(n, p) >= k], summed in log space.
inline double binomial_upper_tail(int n, double p, int k) {
    if (k <= 0) {
        return 1.0;
    }
    if (k > n) {
        return 0.0;
    }
    if (p <= 0.0) {
        return 0.0;
    }
    if (p >= 1.0) {
        return 1.0;
    }
    double s = 0.0;
    for (int i = k; i <= n; ++i) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(n - i + 1.0) + i * std::log(p) +
                          (n - i) * std::log1p(-p);
        s += std::exp(lg);
    }
    return std::min(s, 1.0);
}

/// Probability that the median of n runs fails when each fails w.p. gamma.
inline double median_failure(int n, double gamma) {
    return binomial_upper_tail(n, gamma, (n + 1) / 2);
}

/**
 * Smallest odd n whose median fails with probability at most delta.
 *
 * @throws std::invalid_argument unless 0 <= gamma < 1/2 and 0 < delta < 1.
 */
inline int median_reps(double gamma, double delta) {
    require(gamma >= 0.0 && gamma < 0.5, "median_reps: gamma must be in [0, 1/2)");
    require(delta > 0.0 && delta < 1.0, "median_reps: delta must be in (0, 1)");
    int n = 1;
    while (median_failure(n, gamma) > delta) {
        n += 2;
        require(n < 100001, "median_reps: repetition count diverged");
    }
    return n;
}

/// Median of an odd-length sample; the input is reordered.
inline double median_of(std::vector<double> &xs) {
    require(!xs.empty() && xs.size() % 2 == 1, "median_of: need an odd count");
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    return *mid;
}

} // namespace qmcs
