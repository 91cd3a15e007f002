#pragma once

// Minimal fork-join helper. Work items write to their own output slot, so
// results are independent of scheduling; reductions happen afterwards in
// index order.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fiberqed {

/// Thread count: explicit request if positive, else FIBERQED_THREADS, else
/// the hardware concurrency.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FIBERQED_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Run fn(i) for i in [0, n). The first exception thrown by any item is
/// rethrown after all workers join.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::min(std::max(1, threads), std::max(1, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace fiberqed
