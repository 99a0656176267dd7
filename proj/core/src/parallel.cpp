#include "gsdscope/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace gsdscope {

namespace {
thread_local bool g_in_worker = false;
}

std::size_t thread_count() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("GSDSCOPE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap < 1)
            n = 1;
        else if (static_cast<std::size_t>(cap) < n)
            n = static_cast<std::size_t>(cap);
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = g_in_worker ? 1 : thread_count();
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto body = [&] {
        g_in_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                break;
            }
        }
        g_in_worker = false;
    };

    std::vector<std::thread> pool;
    const std::size_t spawn = std::min(workers, n);
    pool.reserve(spawn - 1);
    for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();

    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace gsdscope
