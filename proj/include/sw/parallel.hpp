#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sw {

// Runs fn(i) for i in [0, n) across worker threads. Results must be slotted
// by index on the caller side; the first failing index's exception is
// rethrown so error reporting stays deterministic.
template <class F>
void parallel_for(int n, F&& fn) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    int threads = std::max(1, std::min<int>(n, hw == 0 ? 1 : static_cast<int>(hw)));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
    }
}

}  // namespace sw
