#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace geomon {

// Deterministic random source. Every run derives all of its randomness from
// one root seed, so identical seeds reproduce identical output byte for byte.
// The Gaussian transform is hand-rolled (polar method) instead of
// std::normal_distribution, whose output is implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n); n == 0 returns 0
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        return engine_() % n;
    }

    bool chance(double p) { return uniform() < p; }

    // standard normal deviate
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    // Independent child stream, for per-subsystem seeding.
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9E3779B97F4A7C15ULL));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace geomon
