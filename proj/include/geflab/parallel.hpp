#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace geflab {

// Thread count resolution: explicit argument, else GEFLAB_THREADS, else
// hardware concurrency.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GEFLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Work-stealing parallel map over [0, n).  Each index is processed exactly
// once; callers write results into per-index slots, so the outcome does not
// depend on scheduling.  Exceptions propagate from the first failing worker.
template <class Fn>
void parallel_for(long n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next(0);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (;;) {
                    const long i = next.fetch_add(1);
                    if (i >= n) break;
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<size_t>(t)] = std::current_exception();
                next.store(n);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace geflab
