#include "photonliq/phase_type.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "photonliq/errors.hpp"
#include "photonliq/partial_fractions.hpp"

namespace photonliq {

StageRates::StageRates(std::vector<double> rates) : rates_(std::move(rates)) {
    if (rates_.empty()) throw DomainError("StageRates: at least one stage is required");
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        if (!std::isfinite(rates_[i]) || rates_[i] <= 0.0)
            throw DomainError(fmt::format("StageRates: rate[{}] = {} must be positive and finite", i, rates_[i]));
    }
}

StageRates StageRates::erlang(std::size_t n, double rate) {
    if (n == 0) throw DomainError("StageRates::erlang: N must be >= 1");
    return StageRates(std::vector<double>(n, rate));
}

double StageRates::mean_interval() const noexcept {
    return std::accumulate(rates_.begin(), rates_.end(), 0.0, [](double acc, double r) { return acc + 1.0 / r; });
}

StageRates StageRates::sorted() const {
    auto copy = rates_;
    std::sort(copy.begin(), copy.end());
    return StageRates(std::move(copy));
}

bool StageRates::all_equal() const noexcept {
    return std::all_of(rates_.begin(), rates_.end(), [&](double r) { return r == rates_.front(); });
}

double mean_rate(const StageRates& rates) noexcept { return 1.0 / rates.mean_interval(); }

ExponentialMixture waiting_time_density(const StageRates& rates) {
    // Sorting makes the result independent of the stage order, bit for bit.
    const auto sorted = rates.sorted();
    const auto values = sorted.values();

    std::vector<PoleCluster> clusters;
    std::size_t begin = 0;
    while (begin < values.size()) {
        std::size_t end = begin + 1;
        while (end < values.size() && (values[end] - values[begin]) / values[begin] < kRateClusterTolerance) ++end;
        const double mean = std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(begin),
                                            values.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                            static_cast<double>(end - begin);
        clusters.push_back({complex{-mean, 0.0}, static_cast<int>(end - begin)});
        begin = end;
    }

    const double numerator = std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
    ExponentialMixture density{0.0, inverse_laplace_rational(numerator, clusters)};
    for (auto& t : density.terms) t.amplitude.imag(0.0), t.decay.imag(0.0);
    return density;
}

double pdf(const StageRates& rates, double tau) {
    if (!(tau >= 0.0)) throw DomainError(fmt::format("pdf: tau = {} must be >= 0", tau));
    return std::max(0.0, waiting_time_density(rates).evaluate(tau));
}

complex laplace(const StageRates& rates, complex s) {
    complex value{1.0, 0.0};
    for (double r : rates.values()) {
        const complex denom = s + r;
        if (std::abs(denom) <= 4.0 * std::numeric_limits<double>::epsilon() * r)
            throw PoleError(fmt::format("laplace: s = {}{:+}i is the pole -{}", s.real(), s.imag(), r));
        value *= r / denom;
    }
    return value;
}

double sample_interval(const StageRates& rates, Rng& rng) noexcept {
    double total = 0.0;
    for (double r : rates.values()) total += rng.exponential(r);
    return total;
}

std::vector<double> sample_intervals(const StageRates& rates, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(count);
    for (auto& x : out) x = sample_interval(rates, rng);
    return out;
}

}  // namespace photonliq
