#pragma once

// Deterministic parallel map-reduce. Work is split into fixed-size blocks;
// workers claim blocks through an atomic cursor, per-block partials are
// stored by block index, and the final fold runs in block order, so results
// never depend on the worker count. CACHESIM_THREADS caps the pool.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cachesim {

inline int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    int budget = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("CACHESIM_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1 && cap < budget)
            budget = static_cast<int>(cap);
    }
    return budget;
}

inline constexpr int64_t kParallelBlock = 1024;

// fold of fn(i) over i in [0, count) under operator+=, in index order.
template <typename T, typename Fn>
T parallel_map_sum(int64_t count, T zero, Fn&& fn) {
    if (count <= 0) return zero;
    int64_t blocks = (count + kParallelBlock - 1) / kParallelBlock;
    int workers = thread_budget();
    if (workers > blocks) workers = static_cast<int>(blocks);

    std::vector<T> partial(static_cast<size_t>(blocks), zero);
    auto run_block = [&](int64_t b) {
        int64_t lo = b * kParallelBlock;
        int64_t hi = lo + kParallelBlock < count ? lo + kParallelBlock : count;
        T acc = zero;
        for (int64_t i = lo; i < hi; ++i) acc += fn(i);
        partial[static_cast<size_t>(b)] = acc;
    };

    if (workers <= 1) {
        for (int64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<int64_t> cursor{0};
        auto worker = [&] {
            for (;;) {
                int64_t b = cursor.fetch_add(1);
                if (b >= blocks) return;
                run_block(b);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    T total = zero;
    for (const T& part : partial) total += part;
    return total;
}

}  // namespace cachesim
