#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace osim {

// Run fn(begin, end) over `jobs` contiguous shards of [0, n). Shard
// boundaries depend only on (n, jobs), never on scheduling, so callers that
// keep per-index state and merge shard outputs in index order stay
// deterministic. jobs <= 1 runs inline.
template <typename Fn>
void parallel_shards(int jobs, std::size_t n, Fn&& fn) {
    if (n == 0) return;
    if (jobs <= 1 || n == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(k);
    const std::size_t base = n / k;
    const std::size_t rem = n % k;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t end = begin + base + (i < rem ? 1 : 0);
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& th : pool) th.join();
}

}  // namespace osim
