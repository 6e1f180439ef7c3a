#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lfc {

// Worker count: LFCRYPT_THREADS overrides, otherwise hardware concurrency.
// This is the only environment variable the library reads.
inline int worker_count() {
    if (const char* s = std::getenv("LFCRYPT_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n). Each index is claimed by exactly one worker;
// fn must write only to its own per-index slot so that results do not depend
// on the schedule. Exceptions propagate (first one wins).
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int spawn = static_cast<int>(std::min<size_t>(workers, n));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failed.load() && err) std::rethrow_exception(err);
}

}  // namespace lfc
