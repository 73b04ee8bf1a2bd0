// parallel.hpp — Bounded worker pool over an index range

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nesslab {

// Calls fn(i) for i in [0, count) on up to `workers` threads. Each index runs
// exactly once; the first exception thrown by fn is rethrown after all
// workers have joined. fn must not throw if partial results matter: catch
// inside fn and record the failure instead.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn)
{
    const std::size_t nthreads =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    bool expected = false;
                    if (failed.compare_exchange_strong(expected, true)) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace nesslab
