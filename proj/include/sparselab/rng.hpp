#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sparselab {

/// Seeded generator with portable uniform/normal draws.
///
/// std::uniform_real_distribution and std::normal_distribution are
/// implementation-defined; these draws depend only on mt19937_64's output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Rejection keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform();
        while (u <= 0.0) u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * std::numbers::pi * v);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * v);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sparselab
