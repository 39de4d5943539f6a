#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace entire_dyn {

/// Worker count for grid and sampling drivers; 0 means one per logical core.
struct Parallelism {
    unsigned workers = 0;

    unsigned resolved() const
    {
        if (workers > 0) {
            return workers;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1U : hc;
    }
};

/// Calls body(i) for every i in [0, n), splitting the range into contiguous
/// blocks, one per worker. The first exception thrown by any worker is
/// rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Parallelism par, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(par.resolved(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) {
                        body(i);
                    }
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// Sum of count(i) over [0, n). Integer accumulation makes the result
/// independent of the number of workers.
template <typename Count>
std::uint64_t parallel_sum(std::size_t n, Parallelism par, Count&& count)
{
    std::vector<std::uint64_t> per_index(n);
    parallel_for(n, par, [&](std::size_t i) { per_index[i] = static_cast<std::uint64_t>(count(i)); });
    std::uint64_t total = 0;
    for (std::uint64_t v : per_index) {
        total += v;
    }
    return total;
}

} // namespace entire_dyn
