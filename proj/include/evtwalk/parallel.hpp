#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evtwalk {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(block_index, begin, end) once for every fixed-size block of
// [0, n_items). The block grid depends only on (n_items, block_size), never
// on the thread count, and callers write per-block or per-item slots, so
// results are identical for any number of threads.
template <class Fn>
void parallel_blocks(std::uint64_t n_items, std::uint64_t block_size,
                     unsigned threads, Fn&& fn) {
    if (n_items == 0) return;
    if (block_size < 1) block_size = 1;
    const std::uint64_t n_blocks = (n_items + block_size - 1) / block_size;
    threads = resolve_threads(threads);
    if (threads > n_blocks) threads = static_cast<unsigned>(n_blocks);

    if (threads <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            fn(b, lo, hi);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            try {
                fn(b, lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace evtwalk
