#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gafzero {

inline int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n ? static_cast<int>(n) : 1;
}

/// Run fn(i) for i in [0, n) on `workers` threads (static block split).
/// Results must be written to per-index slots; aggregation stays
/// order-independent so worker count never changes any estimate.
template <class F>
void parallel_for(long n, int workers, F&& fn) {
    if (workers <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<int>(std::min<long>(workers, n));
    std::vector<std::thread> threads;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < workers; ++t) {
        long lo = n * t / workers, hi = n * (t + 1) / workers;
        threads.emplace_back([&, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace gafzero
