#pragma once

// Static-partition parallel loop over an index range. Each index is handled by
// exactly one worker and results are written to caller-owned slots, so the
// outcome does not depend on the number of threads.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace flockdyn {

/// Worker count: `requested` if positive, else the hardware concurrency,
/// capped by the FLOCKDYN_THREADS environment variable when set.
int resolve_thread_count(int requested);

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, resolve_thread_count(threads))));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace flockdyn
