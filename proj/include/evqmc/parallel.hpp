// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evqmc {

// Worker count for study loops: EVQMC_WORKERS if set, else hardware threads.
inline unsigned worker_count() {
    if (const char* env = std::getenv("EVQMC_WORKERS")) {
        long n = std::atol(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(i) for i in [0, count) on a small task pool. Work items must be
// independent; callers write into slot i and fold in index order afterwards,
// which makes every aggregate independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = worker_count();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace evqmc
