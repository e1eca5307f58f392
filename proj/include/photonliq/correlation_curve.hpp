#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "photonliq/exponential_mixture.hpp"

namespace photonliq {

// Uniform grid start + i * step, i < count.
struct TauGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    // count points spanning [lo, hi] inclusive.
    static TauGrid span(double lo, double hi, std::size_t count);

    double operator[](std::size_t i) const noexcept { return start + step * static_cast<double>(i); }
    std::vector<double> values() const;
};

// Raw material of a histogram estimate, kept so estimates can be pooled.
struct PairHistogram {
    std::vector<std::uint64_t> counts;  // ordered pairs per delay bin
    std::uint64_t events = 0;           // photons over all segments
    double window = 0.0;                // summed observation time
    std::uint64_t segments = 0;         // independent streams pooled
};

struct CorrelationCurve {
    std::vector<double> tau;
    std::vector<double> g2;
    std::vector<double> errors;  // empty when the curve carries no uncertainties
    double bin_width = 0.0;
    std::optional<PairHistogram> histogram;

    std::size_t size() const noexcept { return tau.size(); }
    bool has_errors() const noexcept { return !errors.empty(); }

    // Adds the reflection tau -> -tau (g2 is even by stationarity).  A point
    // at tau == 0 is not duplicated.
    CorrelationCurve mirrored() const;
};

CorrelationCurve sample_curve(const ExponentialMixture& mixture, const TauGrid& grid);

}  // namespace photonliq
