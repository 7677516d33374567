#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace artic {

/// Standard gravity [m/s^2]. Fixed, not a tunable parameter.
inline constexpr double kGravity = 9.81;

/// Longitudinal speeds below this are clamped before they enter slip-angle
/// and tire-lag denominators [m/s].
inline constexpr double kMinLongitudinalSpeed = 0.5;

/// Reciprocal-condition threshold below which the mass matrix is treated as
/// singular and the simulation aborts.
inline constexpr double kMinReciprocalCondition = 1e-12;

/// Cost assigned to parameter candidates whose simulation fails.
inline constexpr double kFailedSimulationCost = 1e6;

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter set violates a model invariant (non-positive mass, degenerate
/// geometry, out-of-range tire coefficients, ...).
class invalid_parameter_error : public error {
public:
    using error::error;
};

/// Malformed input file; message carries the offending line where known.
class parse_error : public error {
public:
    using error::error;
};

/// Bad run configuration (missing file, inconsistent maneuver spec, ...).
class config_error : public error {
public:
    using error::error;
};

/// Simulation aborted; carries the failure time.
class simulation_error : public error {
public:
    simulation_error(const std::string& what, double time)
        : error(what + " (t=" + std::to_string(time) + " s)"), time_(time) {}
    explicit simulation_error(const std::string& what) : error(what), time_(0.0) {}
    double time() const { return time_; }

private:
    double time_;
};

/// splitmix64 step; used to derive independent per-restart RNG seeds from a
/// master seed so results do not depend on scheduling.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Runs fn(0..n-1) on up to `threads` workers. Each index is processed
/// exactly once; callers keep determinism by writing to per-index slots.
/// The first exception (lowest worker id) is rethrown after all join.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    // Static striping: worker w handles i = w, w+W, w+2W, ...
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, &errors, n, w, workers] {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < n;
                     i += static_cast<std::size_t>(workers)) {
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace artic
