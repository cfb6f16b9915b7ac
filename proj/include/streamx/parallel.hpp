#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace streamx {

// Worker count: STREAMX_THREADS caps it, hardware concurrency is the default.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("STREAMX_THREADS")) {
        const long req = std::strtol(env, nullptr, 10);
        if (req >= 1 && req < static_cast<long>(1u << 16)) return static_cast<unsigned>(req);
    }
    return hw;
}

// Runs fn(chunk_index) for chunk_index in [0, num_chunks) across workers.
// fn must only touch per-chunk state; merging is the caller's job.
inline void parallel_chunks(std::uint64_t num_chunks,
                            const std::function<void(std::uint64_t)>& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), num_chunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < num_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= num_chunks) return;
                fn(c);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace streamx
