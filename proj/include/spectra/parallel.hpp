#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spectra {

inline int worker_count() {
    if (const char* env = std::getenv("SPECTRA_RH_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Index-parallel loop with deterministic output: the worker writes results
// keyed by index, so the merge order never depends on scheduling.
template <typename F>
void parallel_for(int count, F&& body) {
    const int workers = std::min(worker_count(), count > 0 ? count : 1);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace spectra
