#include "spinwall/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spinwall {

namespace {

int g_threads = 0;

int default_threads() {
    if (const char* env = std::getenv("SPINWALL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

int thread_count() {
    if (g_threads <= 0) g_threads = default_threads();
    return g_threads;
}

void set_thread_count(int n) { g_threads = n > 0 ? n : 0; }

namespace {

void pool_run(std::size_t n, const std::function<void(std::size_t)>& fn, int nw) {
    if (static_cast<std::size_t>(nw) > n) nw = static_cast<int>(n);
    // Chunked dynamic scheduling; result is index-deterministic because each
    // index is claimed and executed exactly once.
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (8 * nw));
    auto worker = [&] {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nw - 1);
    for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int nw = thread_count();
    if (nw <= 1 || n < 1024) {  // spawn cost dwarfs small loops
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    pool_run(n, fn, nw);
}

void parallel_tasks(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int nw = thread_count();
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    pool_run(n, fn, nw);
}

}  // namespace spinwall
