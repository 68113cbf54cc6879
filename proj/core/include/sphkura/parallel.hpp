#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sphkura {

/// Worker count actually used for `requested` (0 means hardware concurrency).
inline unsigned resolve_threads(unsigned requested) noexcept
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(begin, end) on contiguous chunks of [0, count). Chunks write
/// disjoint outputs, so results never depend on the thread count. The first
/// exception thrown by any chunk is rethrown on the caller's thread.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), count);
    if (workers <= 1 || count < 256) {
        if (count > 0) {
            body(std::size_t{0}, count);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    try {
        body(std::size_t{0}, std::min(count, chunk));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    pool.clear();
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace sphkura
