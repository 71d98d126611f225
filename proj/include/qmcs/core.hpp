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
 * Shared vocabulary: error types, the query ledger, and the seeded RNG.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace qmcs {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A detected violation of a mathematical contract (failed schedule,
/// broken overlap condition, non-ergodic chain, ...). Distinct from bad
/// caller input, which is reported as std::invalid_argument.
class ContractViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The relative-error estimator drew only zero-valued samples for its proxy
/// mean and cannot rescale.
class ZeroProxyMean : public ContractViolation {
  public:
    using ContractViolation::ContractViolation;
};

/// Reading or writing an external file failed.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

/// a * b + c on ledger counters.
/// @throws std::overflow_error if the result does not fit in 64 bits.
inline std::uint64_t checked_cost(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    std::uint64_t prod = 0;
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &out)) {
        throw std::overflow_error("ledger counter overflow");
    }
    return out;
}

/**
 * Counters of every metered resource consumed by an estimation run.
 *
 * Counters only ever increase during a run. Ledgers from independent shards
 * merge by addition.
 */
struct QueryLedger {
    std::uint64_t a_uses = 0;
    std::uint64_t a_inv_uses = 0;
    std::uint64_t state_copies = 0;
    std::uint64_t reflection_uses = 0;
    std::uint64_t walk_steps = 0;
    std::uint64_t classical_samples = 0;

    /// Reflections plus walk steps: the quantum cost measure used for
    /// speedup comparisons.
    [[nodiscard]] std::uint64_t quantum_total() const {
        return reflection_uses + walk_steps;
    }

    QueryLedger &operator+=(const QueryLedger &other) {
        a_uses += other.a_uses;
        a_inv_uses += other.a_inv_uses;
        state_copies += other.state_copies;
        reflection_uses += other.reflection_uses;
        walk_steps += other.walk_steps;
        classical_samples += other.classical_samples;
        return *this;
    }

    friend QueryLedger operator+(QueryLedger lhs, const QueryLedger &rhs) {
        lhs += rhs;
        return lhs;
    }

    /// Difference of two snapshots of the same ledger; `earlier` must not be
    /// ahead of `*this` in any counter.
    [[nodiscard]] QueryLedger since(const QueryLedger &earlier) const {
        QueryLedger d;
        d.a_uses = a_uses - earlier.a_uses;
        d.a_inv_uses = a_inv_uses - earlier.a_inv_uses;
        d.state_copies = state_copies - earlier.state_copies;
        d.reflection_uses = reflection_uses - earlier.reflection_uses;
        d.walk_steps = walk_steps - earlier.walk_steps;
        d.classical_samples = classical_samples - earlier.classical_samples;
        return d;
    }

    friend bool operator==(const QueryLedger &, const QueryLedger &) = default;
};

/// splitmix64 finaliser; used to derive independent per-trial seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t trial_seed(std::uint64_t seed,
                                                 std::uint64_t trial) {
    return mix_seed(mix_seed(seed) ^ mix_seed(trial + 0x632be59bd9b4e019ULL));
}

/**
 * Seeded 64-bit Mersenne Twister with a platform-independent uniform draw.
 *
 * std::uniform_real_distribution is implementation-defined, so doubles are
 * built directly from the top 53 bits of the engine output.
 */
class Rng {
  public:
    using result_type = std::mt19937_64::result_type;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-free rejection keeps the draw exactly uniform.
        const std::uint64_t limit = max() - (max() % n) - 1;
        std::uint64_t r = engine_();
        while (r > limit) {
            r = engine_();
        }
        return r % n;
    }

    bool coin() { return (engine_() >> 63) != 0; }

  private:
    std::mt19937_64 engine_;
};

} // namespace qmcs
