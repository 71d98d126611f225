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
 * Amplitude estimation simulated through its exact outcome law.
 *
 * With phase omega = asin(sqrt(a))/pi and grid size t, outcome y has
 * probability equal to the average of the Fejer kernel
 * sin^2(pi t D)/(t^2 sin^2(pi D)) at D = y/t - omega and D = y/t + omega.
 * The reported estimate is sin^2(pi y/t). Conjugate outcomes y and t - y give
 * the same estimate, so the estimate law only depends on the +omega branch.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/powering.hpp"

namespace qmcs {

struct PhasePoint {
    double a;
    double omega;
    std::int64_t t;

    static PhasePoint make(double a, std::int64_t t) {
        require(a >= 0.0 && a <= 1.0, "amplitude must lie in [0, 1]");
        require(t >= 1, "grid size t must be >= 1");
        return {a, std::asin(std::sqrt(a)) / kPi, t};
    }
};

/// sin^2(pi m / t) with m folded into [0, t/2] so conjugates agree bitwise.
inline double ae_estimate_value(std::int64_t y, std::int64_t t) {
    const std::int64_t m = std::min(y, t - y);
    const double s = std::sin(kPi * static_cast<double>(m) / static_cast<double>(t));
    return s * s;
}

namespace detail {

/// Position of t*omega split as y0 + f with f in [0, 1).
struct GridOffset {
    std::int64_t y0;
    double f;
    bool on_grid;
};

inline GridOffset grid_offset(const PhasePoint &p) {
    const double c = static_cast<double>(p.t) * p.omega;
    double y0 = std::floor(c);
    double f = c - y0;
    const double snap = std::max(1e-10, 64.0 * 2.220446049250313e-16 * c);
    bool on_grid = false;
    if (f <= snap) {
        f = 0.0;
        on_grid = true;
    } else if (1.0 - f <= snap) {
        y0 += 1.0;
        f = 0.0;
        on_grid = true;
    }
    return {static_cast<std::int64_t>(y0), f, on_grid};
}

/// Kernel mass at offset j from y0 for fractional position f (f > 0).
inline double offset_mass(std::int64_t j, double f, double sin2f, double t) {
    const double s = std::sin(kPi * (static_cast<double>(j) - f) / t);
    return sin2f / (t * t * s * s);
}

inline std::int64_t wrap(std::int64_t y, std::int64_t t) {
    const std::int64_t r = y % t;
    return r < 0 ? r + t : r;
}

} // namespace detail

/**
 * Probability of each raw outcome y in [0, t), mixing both conjugate phases.
 */
inline std::vector<double> ae_outcome_law(double a, std::int64_t t) {
    const PhasePoint p = PhasePoint::make(a, t);
    std::vector<double> law(static_cast<std::size_t>(t), 0.0);
    const auto g = detail::grid_offset(p);
    const double tt = static_cast<double>(t);
    for (int sign : {1, -1}) {
        if (g.on_grid) {
            law[static_cast<std::size_t>(detail::wrap(sign * g.y0, t))] += 0.5;
            continue;
        }
        const double sin2f = std::pow(std::sin(kPi * g.f), 2);
        for (std::int64_t y = 0; y < t; ++y) {
            const std::int64_t j = y - g.y0;
            law[static_cast<std::size_t>(detail::wrap(sign * y, t))] +=
                0.5 * detail::offset_mass(j, g.f, sin2f, tt);
        }
    }
    return law;
}

/// Exact law of the estimate sin^2(pi y / t).
inline ValueDistribution ae_outcome_distribution(double a, std::int64_t t) {
    const auto law = ae_outcome_law(a, t);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(law.size());
    for (std::int64_t y = 0; y < t; ++y) {
        pairs.emplace_back(ae_estimate_value(y, t), law[static_cast<std::size_t>(y)]);
    }
    return ValueDistribution::from_law(pairs);
}

namespace detail {

/// Exact draw of the raw outcome y for the +omega branch.
template <typename Rng_>
std::int64_t sample_outcome(const PhasePoint &p, Rng_ &rng) {
    const auto g = grid_offset(p);
    const std::int64_t t = p.t;
    if (g.on_grid) {
        return wrap(g.y0, t);
    }
    const double tt = static_cast<double>(t);
    const double f = g.f;
    const double sin2f = std::pow(std::sin(kPi * f), 2);
    constexpr std::int64_t kWindow = 16;
    const std::int64_t j_lo =
        static_cast<std::int64_t>(std::floor(f - tt / 2.0)) + 1;
    const std::int64_t j_hi = j_lo + t - 1;
    const std::int64_t w_lo = std::max(j_lo, -kWindow);
    const std::int64_t w_hi = std::min(j_hi, kWindow);

    double u = rng.uniform();
    double window_mass = 0.0;
    std::int64_t last = w_lo;
    for (std::int64_t j = w_lo; j <= w_hi; ++j) {
        const double m = offset_mass(j, f, sin2f, tt);
        window_mass += m;
        last = j;
        if (u < window_mass) {
            return wrap(g.y0 + j, t);
        }
    }
    const bool has_tail = w_lo > j_lo || w_hi < j_hi;
    if (!has_tail || window_mass >= 1.0) {
        return wrap(g.y0 + last, t);
    }

    // Tail rejection sampler. The envelope sin^2(pi f)/(4 d^2) dominates the
    // kernel at distance d = |j - f|; proposals come from density 1/x^2.
    const bool right_ok = w_hi < j_hi;
    const bool left_ok = w_lo > j_lo;
    const double ra = static_cast<double>(kWindow) - f;
    const double rb = static_cast<double>(j_hi) - f;
    const double la = static_cast<double>(kWindow) + f;
    const double lb = f - static_cast<double>(j_lo);
    const double zr = right_ok ? (1.0 / ra - 1.0 / rb) : 0.0;
    const double zl = left_ok ? (1.0 / la - 1.0 / lb) : 0.0;
    for (;;) {
        const bool right = rng.uniform() * (zr + zl) < zr;
        const double A = right ? ra : la;
        const double Bv = right ? rb : lb;
        const double U = rng.uniform();
        const double X = 1.0 / (1.0 / A - U * (1.0 / A - 1.0 / Bv));
        std::int64_t j;
        if (right) {
            j = static_cast<std::int64_t>(std::ceil(X + f));
            if (j <= kWindow || j > j_hi) {
                continue;
            }
        } else {
            j = -static_cast<std::int64_t>(std::ceil(X - f));
            if (j >= -kWindow || j < j_lo) {
                continue;
            }
        }
        const double d = std::abs(static_cast<double>(j) - f);
        const double envelope = sin2f / (4.0 * d * d);
        const double accept = ((d - 1.0) / d) * offset_mass(j, f, sin2f, tt) / envelope;
        if (rng.uniform() < accept) {
            return wrap(g.y0 + j, t);
        }
    }
}

} // namespace detail

/**
 * One amplitude-estimation shot.
 *
 * Charges t reflection uses, one use each of A and its inverse, and one
 * state copy.
 */
template <typename Rng_>
double ae_sample(double a, std::int64_t t, Rng_ &rng, QueryLedger &ledger) {
    const PhasePoint p = PhasePoint::make(a, t);
    ledger.reflection_uses += static_cast<std::uint64_t>(t);
    ledger.a_uses += 1;
    ledger.a_inv_uses += 1;
    ledger.state_copies += 1;
    return ae_estimate_value(detail::sample_outcome(p, rng), t);
}

/// Median of reps independent shots.
template <typename Rng_>
double ae_median(double a, std::int64_t t, int reps, Rng_ &rng, QueryLedger &ledger) {
    require(reps >= 1 && reps % 2 == 1, "ae_median: reps must be odd");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        xs.push_back(ae_sample(a, t, rng, ledger));
    }
    return median_of(xs);
}

/**
 * Dense simulation of phase estimation on the two-dimensional Grover
 * rotation, followed by an inverse Fourier transform of the size-t register.
 *
 * @throws std::invalid_argument if t > 2^14.
 */
inline ValueDistribution ae_circuit_distribution(double a, std::int64_t t) {
    require(t >= 1 && t <= (std::int64_t{1} << 14),
            "ae_circuit_distribution: t must be in [1, 2^14]");
    require(a >= 0.0 && a <= 1.0, "amplitude must lie in [0, 1]");
    using cd = std::complex<double>;
    const double c = std::sqrt(1.0 - a);
    const double s = std::sqrt(a);
    // Q = (2|psi><psi| - I) * diag(1, -1)
    const double q00 = 2 * c * c - 1, q01 = -(2 * c * s);
    const double q10 = 2 * c * s, q11 = -(2 * s * s - 1);
    const std::size_t n = static_cast<std::size_t>(t);
    std::vector<double> r0(n), r1(n);
    double x0 = c, x1 = s;
    for (std::size_t y = 0; y < n; ++y) {
        r0[y] = x0;
        r1[y] = x1;
        const double n0 = q00 * x0 + q01 * x1;
        const double n1 = q10 * x0 + q11 * x1;
        x0 = n0;
        x1 = n1;
    }
    const double tt = static_cast<double>(t);
    std::vector<cd> roots(n);
    for (std::size_t m = 0; m < n; ++m) {
        roots[m] = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / tt);
    }
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd a0 = 0.0, a1 = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const cd w = roots[(y * k) % n];
            a0 += w * r0[y];
            a1 += w * r1[y];
        }
        const double prob = (std::norm(a0) + std::norm(a1)) / (tt * tt);
        pairs.emplace_back(ae_estimate_value(static_cast<std::int64_t>(k), t), prob);
    }
    return ValueDistribution::from_law(pairs);
}

/// Additive error radius that a single shot meets w.p. >= 8/pi^2.
inline double theorem1_radius(double a, std::int64_t t) {
    const double tt = static_cast<double>(t);
    return 2.0 * kPi * std::sqrt(a * (1.0 - a)) / tt + kPi * kPi / (tt * tt);
}

/// Exact probability that one shot lands within radius of a.
inline double kernel_coverage(double a, std::int64_t t, double radius) {
    const auto d = ae_outcome_distribution(a, t);
    return d.mass_where([&](double v) { return std::abs(v - a) <= radius + 1e-12; });
}

/**
 * Smallest C such that one shot meets C (sqrt(a)/t + 1/t^2) w.p. >= target
 * for every (a, t) on the grid.
 */
inline double calibrate_bound_constant(const std::vector<std::int64_t> &ts,
                                       const std::vector<double> &amplitudes,
                                       double target = 8.0 / (kPi * kPi)) {
    double worst = 0.0;
    for (const auto t : ts) {
        const double tt = static_cast<double>(t);
        for (const double a : amplitudes) {
            const auto d = ae_outcome_distribution(a, t);
            const double unit = std::sqrt(a) / tt + 1.0 / (tt * tt);
            std::vector<std::pair<double, double>> ratio;
            for (const auto &o : d.support()) {
                ratio.emplace_back(std::abs(o.value - a) / unit, o.prob);
            }
            std::sort(ratio.begin(), ratio.end());
            double acc = 0.0;
            for (const auto &[r, pr] : ratio) {
                acc += pr;
                if (acc >= target - 1e-15) {
                    worst = std::max(worst, r);
                    break;
                }
            }
        }
    }
    return worst;
}

struct ArcsinGap {
    double lhs;
    double rhs;
};

/// |asin x - asin y| against (pi/2) sqrt|x^2 - y^2|.
inline ArcsinGap arcsin_gap_bound(double x, double y) {
    require(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0,
            "arcsin_gap_bound: arguments must lie in [0, 1]");
    return {std::abs(std::asin(x) - std::asin(y)),
            0.5 * kPi * std::sqrt(std::abs(x * x - y * y))};
}

/// Upper bound on the TV distance between two outcome laws with t uses.
inline double measurement_tv_bound(double mu_a, double mu_b, std::int64_t t) {
    require(mu_a >= 0.0 && mu_a <= 1.0 && mu_b >= 0.0 && mu_b <= 1.0,
            "measurement_tv_bound: means must lie in [0, 1]");
    return kPi * kPi / (2.0 * std::sqrt(3.0)) * static_cast<double>(t) *
           std::sqrt(std::abs(mu_a - mu_b));
}

/// Exact TV distance between the raw outcome laws.
inline double measurement_tv_exact(double mu_a, double mu_b, std::int64_t t) {
    const auto pa = ae_outcome_law(mu_a, t);
    const auto pb = ae_outcome_law(mu_b, t);
    double s = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        s += std::abs(pa[i] - pb[i]);
    }
    return 0.5 * s;
}

/// Failure bound for the variance estimator run on a gamma-perturbed input.
struct StabilityBound {
    double gamma;
    std::uint64_t T;
    double bound;

    static StabilityBound make(double gamma, std::uint64_t T) {
        require(gamma >= 0.0, "StabilityBound: gamma must be >= 0");
        return {gamma, T,
                0.3 + kPi * kPi / std::sqrt(6.0) * static_cast<double>(T) *
                          std::sqrt(gamma)};
    }
};

} // namespace qmcs
