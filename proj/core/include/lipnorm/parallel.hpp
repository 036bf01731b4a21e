#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lipnorm {

// LIPNORM_THREADS caps worker count; default is hardware concurrency.
inline size_t thread_budget() {
    if (const char* env = std::getenv("LIPNORM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<size_t>(v);
    }
    size_t hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs body(i) for i in [0, n). Each body call must write only to its own
// slot; results are then independent of the thread count.
template <typename F>
void parallel_for(size_t n, F&& body) {
    size_t threads = std::min(thread_budget(), n);
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> counter{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (size_t i = counter.fetch_add(1); i < n; i = counter.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace lipnorm
