#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace photonliq {

// Name written into every metadata block that records a seed.
inline constexpr std::string_view kGeneratorIdentity = "mt19937_64+seed_seq(seed,stream)";

// Seeded Mersenne Twister whose state is derived from (seed, stream) through
// std::seed_seq, so independent shards use distinct, reproducible streams.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    // Uniform on (0, 1] with 53 random bits; never returns 0.
    double uniform_open() noexcept {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Inverse transform sample of Exp(rate).
    double exponential(double rate) noexcept { return -std::log(uniform_open()) / rate; }

    double normal(double stddev) { return normal_(engine_) * stddev; }

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace photonliq
