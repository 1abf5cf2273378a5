#pragma once

// Minimal chunked parallel-for over an index range. Grid cells in sweeps and
// maps are independent; results are written into preallocated slots by index,
// so the output is deterministic regardless of scheduling. Falls back to a
// plain loop when only one hardware thread is available.

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace geomgate::detail {

inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const size_t workers = std::min<size_t>(hw, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace geomgate::detail
