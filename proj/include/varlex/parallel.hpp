#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace varlex {

/// Global cap on worker threads (0 = hardware concurrency). Set once from the
/// CLI --threads flag; reads are racy-but-benign since workers never set it.
int& thread_cap();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Falls back to a single
/// inline call for small n or a cap of 1. Callers must only write to
/// index-owned slots; reductions belong outside.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t grain = 4096) {
    int cap = thread_cap();
    unsigned hw = cap > 0 ? static_cast<unsigned>(cap) : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t chunks = std::min<std::size_t>(hw, n / grain + (n % grain ? 1 : 0));
    if (chunks <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t per = (n + chunks - 1) / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t lo = c * per;
        std::size_t hi = std::min(n, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace varlex
