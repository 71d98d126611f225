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
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qmcs/core.hpp"

namespace qmcs {

/// Worker count: hardware concurrency, capped by QMCS_THREADS if set.
inline unsigned worker_count() {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("QMCS_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) {
                n = std::min(n, static_cast<unsigned>(cap));
            }
        } catch (const std::exception &) {
        }
    }
    return n;
}

/**
 * Run trial(i, rng, ledger) for i in [0, n) across workers.
 *
 * Trial i owns an Rng seeded with trial_seed(seed, i) and a fresh ledger, so
 * results do not depend on scheduling. Returns results in trial order; the
 * summed ledger is added to `total`.
 */
template <typename Result, typename Trial>
std::vector<Result> run_trials(std::uint64_t seed, std::size_t n, Trial trial,
                               QueryLedger *total = nullptr) {
    std::vector<Result> results(n);
    std::vector<QueryLedger> ledgers(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                Rng rng(trial_seed(seed, i));
                results[i] = trial(i, rng, ledgers[i]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = n;
            }
        }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    if (total != nullptr) {
        for (const auto &l : ledgers) {
            *total += l;
        }
    }
    return results;
}

} // namespace qmcs
