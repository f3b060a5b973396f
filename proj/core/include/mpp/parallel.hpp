#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mpp {

/// Draws per substream chunk in batch samplers. Chunk c of a batch always
/// consumes substream c, so output does not depend on thread scheduling.
inline constexpr std::size_t kSamplerChunk = 4096;

/// Runs body(chunk_index, begin, end) over [0, total) split into fixed-size
/// chunks on a small thread pool. The first exception thrown by any chunk is
/// rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t total, std::size_t chunk, Body&& body) {
    if (total == 0) return;
    const std::size_t n_chunks = (total + chunk - 1) / chunk;
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, n_chunks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                const std::size_t begin = c * chunk;
                body(c, begin, std::min(total, begin + chunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads - 1);
        for (std::size_t i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace mpp
