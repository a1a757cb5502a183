#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sfiles::detail {

inline unsigned worker_count(std::size_t jobs) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) {
        workers = 1;
    }
    if (const char* env = std::getenv("SFILES_FORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            workers = static_cast<unsigned>(v);
        }
    }
    if (jobs < workers) {
        workers = static_cast<unsigned>(jobs);
    }
    return workers == 0 ? 1 : workers;
}

/// Runs fn(i) for i in [0, count). Results must be written into
/// index-addressed slots so output never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    failed.store(true);
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace sfiles::detail
