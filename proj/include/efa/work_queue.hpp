#ifndef EFA_WORK_QUEUE_HPP
#define EFA_WORK_QUEUE_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace efa
{
/// Runs fn(i) for i in [0, n) on up to `workers` threads. Jobs are claimed from a shared
/// counter; results must be written to per-index slots so the outcome does not depend on
/// scheduling. If jobs throw, the exception of the lowest failing index is rethrown.
template < typename Fn >
void parallel_for(std::size_t n, int workers, Fn&& fn)
{
    const auto nthreads = static_cast< std::size_t >(std::clamp< long >(workers, 1, static_cast< long >(std::max< std::size_t >(n, 1))));
    if (nthreads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic< std::size_t >        next{0};
    std::vector< std::exception_ptr > errors(n);
    auto                              body = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                fn(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector< std::jthread > pool;
    pool.reserve(nthreads - 1);
    for (std::size_t t = 1; t < nthreads; ++t)
        pool.emplace_back(body);
    body();
    pool.clear();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

/// Maps fn over [0, n) in parallel, returning results in index order.
template < typename Fn >
auto parallel_map(std::size_t n, int workers, Fn&& fn)
{
    using R = decltype(fn(std::size_t{}));
    std::vector< R > out(n);
    parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

inline int default_workers()
{
    return static_cast< int >(std::max(1u, std::thread::hardware_concurrency()));
}
} // namespace efa

#endif // EFA_WORK_QUEUE_HPP
