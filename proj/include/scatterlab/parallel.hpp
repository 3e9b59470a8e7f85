#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace scatterlab {

inline int effective_jobs(int jobs) {
    if (jobs > 0) return jobs;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? (int)hc : 1;
}

// Split [0, total) into contiguous chunks and run fn(worker, lo, hi) on each.
// Exceptions from workers are rethrown on the calling thread.
inline void parallel_ranges(std::uint64_t total, int jobs,
                            const std::function<void(int, std::uint64_t, std::uint64_t)>& fn) {
    int nw = effective_jobs(jobs);
    if ((std::uint64_t)nw > total) nw = total ? (int)total : 1;
    if (nw <= 1) {
        fn(0, 0, total);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(nw);
    std::uint64_t chunk = total / nw, extra = total % nw, lo = 0;
    for (int w = 0; w < nw; ++w) {
        std::uint64_t hi = lo + chunk + (w < (int)extra ? 1 : 0);
        threads.emplace_back([&, w, lo, hi] {
            try {
                fn(w, lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        lo = hi;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace scatterlab
