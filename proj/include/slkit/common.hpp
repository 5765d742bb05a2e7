#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace slkit {

inline constexpr double kPi = 3.14159265358979323846;

/// Bad inputs / violated preconditions. The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (lost bracket, singular system, step underflow).
/// Carries the x or lambda location when one is meaningful. Exit code 3.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what, double where = 0.0)
        : std::runtime_error(what), where_(where) {}
    double where() const { return where_; }

private:
    double where_;
};

namespace detail {
inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> n{0};
    return n;
}
}  // namespace detail

inline void set_threads(int n) { detail::thread_count_slot().store(n > 0 ? n : 0); }

inline int threads() {
    int n = detail::thread_count_slot().load();
    if (n > 0) return n;
    if (const char* env = std::getenv("SLKIT_THREADS")) {
        int e = std::atoi(env);
        if (e > 0) return e;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Work-stealing loop over [0, n). The body must write only to its own
/// index; results are then independent of the schedule. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    int nt = threads();
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr eptr = nullptr;
    std::mutex emu;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(emu);
                if (!eptr) eptr = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    std::size_t spawn = std::min<std::size_t>(nt, n) - 1;
    pool.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (eptr) std::rethrow_exception(eptr);
}

/// Seeded generator with an explicit bit-to-double mapping, so streams are
/// reproducible independently of the standard library's distribution code.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// uniform on [0, 1)
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// uniform on [-1, 1)
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    /// fair sign
    double sign() { return (bits() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 eng_;
};

}  // namespace slkit
