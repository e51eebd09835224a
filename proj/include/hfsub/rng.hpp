#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hfsub {

/// Deterministic, splittable random stream. A (seed, stream_id) pair fully
/// determines the sequence on every platform: the engine is the standardised
/// mt19937_64 and all variates are derived from raw 64-bit draws, avoiding
/// the implementation-defined std::*_distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
            0x9e3779b9u};
        engine_.seed(seq);
        have_spare_ = false;
    }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1], safe as a log() argument.
    double uniform_pos() {
        return 1.0 - uniform();
    }

    /// Standard normal via Box-Muller (cached second value).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Poisson count by exponential spacings; fine for the small means used here.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        double limit = std::exp(-mean);
        double prod = uniform_pos();
        std::uint64_t k = 0;
        while (prod > limit) {
            prod *= uniform_pos();
            ++k;
        }
        return k;
    }

    /// Gamma(shape, rate) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape, double rate) {
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_;
};

} // namespace hfsub
