#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace edl {

// Worker count: explicit request wins, then the EDL_THREADS environment
// variable, then hardware concurrency. Always at least 1, capped at 64.
inline int effective_threads(int requested = 0) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("EDL_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return n > 64 ? 64 : n;
}

// Run fn(tid, begin, end) over contiguous blocks of [0, n). Results must be
// merged with order-independent operations (bit OR, max, ...) so the block
// layout never shows in the output.
template <class Fn>
void parallel_blocks(std::size_t n, int threads, Fn&& fn) {
    const int t = threads < 1 ? 1 : threads;
    if (t == 1 || n < 2) {
        fn(0, std::size_t(0), n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        const std::size_t begin = n * static_cast<std::size_t>(i) / static_cast<std::size_t>(t);
        const std::size_t end = n * static_cast<std::size_t>(i + 1) / static_cast<std::size_t>(t);
        pool.emplace_back([&fn, i, begin, end] { fn(i, begin, end); });
    }
    for (auto& th : pool) th.join();
}

} // namespace edl
