#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace wpt {

// Static contiguous partition of [0, count). fn(begin, end, chunk_index) must
// only write to state owned by its range.
template <class Fn>
void parallel_for_chunks(std::size_t count, int threads, Fn&& fn) {
    const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1 || count < 2 * t) {
        fn(std::size_t{0}, count, std::size_t{0});
        return;
    }
    const std::size_t chunk = (count + t - 1) / t;
    std::vector<std::jthread> pool;
    pool.reserve(t - 1);
    for (std::size_t c = 1; c < t; ++c) {
        const std::size_t b = std::min(count, c * chunk);
        const std::size_t e = std::min(count, b + chunk);
        pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
    }
    fn(std::size_t{0}, std::min(count, chunk), std::size_t{0});
}

}  // namespace wpt
