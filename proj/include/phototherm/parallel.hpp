#pragma once

// Minimal deterministic index-parallel loop. Thread count comes from the
// PHOTOTHERM_THREADS environment variable (0 or unset = hardware concurrency);
// results must be written to per-index slots so ordering never matters.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace phototherm {

inline unsigned thread_budget() {
    unsigned n = 0;
    if (const char* env = std::getenv("PHOTOTHERM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = static_cast<unsigned>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// Runs fn(i) for i in [0, count). The first exception (lowest index) wins.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(thread_budget(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::pair<std::size_t, std::exception_ptr>> errors(workers,
        {count, nullptr});
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::exception_ptr first = nullptr;
    std::size_t first_index = count;
    for (const auto& [idx, err] : errors) {
        if (err && idx < first_index) {
            first_index = idx;
            first = err;
        }
    }
    if (first) std::rethrow_exception(first);
}

} // namespace phototherm
