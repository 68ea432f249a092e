#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tec {

// Worker count: explicit request, else TEC_WORKERS, else hardware threads.
inline unsigned resolve_workers(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TEC_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(chunk, begin, end) over contiguous index chunks. Chunk boundaries
// depend only on n and the chunk count, never on scheduling.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunks, unsigned workers, Body&& body) {
    if (n == 0 || chunks == 0) return;
    chunks = std::min(chunks, n);
    auto range = [&](std::size_t c) {
        return std::pair<std::size_t, std::size_t>{n * c / chunks, n * (c + 1) / chunks};
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const auto [b, e] = range(c);
            body(c, b, e);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t c = w; c < chunks; c += workers) {
                    const auto [b, e] = range(c);
                    body(c, b, e);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(n, 8 * std::max(1u, workers)));
    parallel_chunks(n, chunks, workers, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) body(i);
    });
}

}  // namespace tec
