#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace proxycoll {

// Thread count resolution: explicit request > PROXYCOLL_THREADS > hardware.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PROXYCOLL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work is chunked by index so results written to
// per-index slots are identical to the serial loop.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    threads = std::min(std::max(threads, 1), n);
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace proxycoll
