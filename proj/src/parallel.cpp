#include "tracelab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tracelab {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TRACE_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_chunks(std::size_t n, std::size_t chunk_size, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;

    auto run_chunk = [&](std::size_t ci) {
        std::size_t begin = ci * chunk_size;
        std::size_t end = begin + chunk_size < n ? begin + chunk_size : n;
        fn(ci, begin, end);
    };

    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t ci = next.fetch_add(1);
            if (ci >= n_chunks) return;
            run_chunk(ci);
        }
    };
    std::vector<std::thread> pool;
    std::size_t n_workers = std::min<std::size_t>(threads, n_chunks);
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace tracelab
