// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace n2s {

/// Worker cap for data-parallel loops. 1 disables threading.
inline int& worker_count() {
    static int n = 1;
    return n;
}

/// Static-partition parallel loop. Each index is processed exactly once and
/// workers write disjoint outputs, so results do not depend on the cap.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const std::size_t begin = static_cast<std::size_t>(t) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace n2s
