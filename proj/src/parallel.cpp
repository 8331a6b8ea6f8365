#include "marketgeo/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "marketgeo/errors.hpp"

namespace marketgeo {

int resolve_threads(int requested) {
    if (requested < 0) {
        throw ConfigError("thread count must be positive (or 0 for automatic)");
    }
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MG_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            // Unparseable values fall through to the hardware default.
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    if (threads < 1) threads = 1;
    if (threads > count) threads = count;

    if (threads == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }

    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(static_cast<size_t>(threads));
    workers.reserve(static_cast<size_t>(threads));

    // Static partition: block w covers [begin + w*chunk, ...) with the last
    // block absorbing the remainder. Deterministic regardless of scheduling.
    const int chunk = count / threads;
    const int extra = count % threads;
    int lo = begin;
    for (int w = 0; w < threads; ++w) {
        const int size = chunk + (w < extra ? 1 : 0);
        const int hi = lo + size;
        workers.emplace_back([&fn, &failures, w, lo, hi]() {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                failures[static_cast<size_t>(w)] = std::current_exception();
            }
        });
        lo = hi;
    }
    for (auto& t : workers) t.join();
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

} // namespace marketgeo
