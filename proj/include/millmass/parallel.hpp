#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace millmass {

// Worker count: MILLMASS_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Overrides the worker count for the current process (0 restores the default).
void set_worker_count(std::size_t n);

// Runs body(begin, end, worker) over contiguous chunks of [0, n). Chunk
// boundaries depend only on n and the worker count, and callers reduce
// per-worker partials in worker order, so results are reproducible.
template <typename Body>
void parallel_chunks(std::size_t n, Body&& body)
{
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 2)
    {
        body(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end, w] {
                try
                {
                    body(begin, end, w);
                }
                catch (...)
                {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// Element-wise parallel loop; each index is visited exactly once.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i)
            fn(i);
    });
}

} // namespace millmass
