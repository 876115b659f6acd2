#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace molres {

/// Run fn(begin, end) over [0, n) split into contiguous chunks, one per worker.
/// Each chunk writes only its own outputs, so results do not depend on the
/// worker count. workers <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    if (workers <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> threads;
    threads.reserve(w - 1);
    for (std::size_t t = 1; t < w; ++t) {
        const std::size_t begin = t * chunk;
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(std::size_t{0}, std::min(n, chunk));
    for (auto& th : threads) th.join();
}

} // namespace molres
