#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "photonliq/exponential_mixture.hpp"
#include "photonliq/random.hpp"

namespace photonliq {

// Rates of the sequential stages that separate two emissions: index 0 is the
// excitation (pump) rate, the rest are the cascade decay rates in order.
class StageRates {
public:
    // Throws DomainError unless non-empty, finite and strictly positive.
    explicit StageRates(std::vector<double> rates);

    // N identical stages (Erlang waiting time).
    static StageRates erlang(std::size_t n, double rate);

    std::span<const double> values() const noexcept { return rates_; }
    std::size_t size() const noexcept { return rates_.size(); }
    double operator[](std::size_t i) const { return rates_[i]; }

    // Mean waiting time, sum of 1/rate_i.
    double mean_interval() const noexcept;

    // Same rates in ascending order.
    StageRates sorted() const;

    bool all_equal() const noexcept;

private:
    std::vector<double> rates_;
};

// Relative spread under which rates are merged into one repeated rate.
inline constexpr double kRateClusterTolerance = 1e-9;

// Long-run emission rate 1 / sum(1/rate_i).
double mean_rate(const StageRates& rates) noexcept;

// Waiting-time density as a mixture with baseline 0.  Rates equal within
// kRateClusterTolerance are merged and produce tau^k e^{-rate tau} terms.
ExponentialMixture waiting_time_density(const StageRates& rates);

// Density of the sum of independent Exp(rate_i) at tau >= 0.
double pdf(const StageRates& rates, double tau);

// prod_i rate_i / (s + rate_i).  Throws PoleError at s = -rate_i.
complex laplace(const StageRates& rates, complex s);

// One waiting time: the sum of one exponential draw per stage.
double sample_interval(const StageRates& rates, Rng& rng) noexcept;

// count independent waiting times drawn with Rng(seed).
std::vector<double> sample_intervals(const StageRates& rates, std::size_t count, std::uint64_t seed);

}  // namespace photonliq
