#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "photonliq/correlation_curve.hpp"
#include "photonliq/phase_type.hpp"

namespace photonliq {

// Provenance carried alongside a stream and written to its sidecar file.
struct StreamMetadata {
    std::vector<double> rates;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::string generator{kGeneratorIdentity};
    double jitter = 0.0;
    std::uint64_t jitter_seed = 0;
};

// Strictly increasing emission times inside [0, duration].
class PhotonStream {
public:
    PhotonStream() = default;

    // Throws ValidationError naming the first index that breaks ordering or
    // lies outside the window.
    PhotonStream(std::vector<double> timestamps, double duration, StreamMetadata metadata = {});

    std::span<const double> timestamps() const noexcept { return timestamps_; }
    double duration() const noexcept { return duration_; }
    std::size_t size() const noexcept { return timestamps_.size(); }
    bool empty() const noexcept { return timestamps_.empty(); }
    const StreamMetadata& metadata() const noexcept { return metadata_; }

    double rate_estimate() const noexcept { return duration_ > 0.0 ? static_cast<double>(size()) / duration_ : 0.0; }

private:
    std::vector<double> timestamps_;
    double duration_ = 0.0;
    StreamMetadata metadata_;
};

// Renewal stream: cumulative sums of independent waiting times drawn with
// Rng(seed, stream_id), truncated at duration.  The process starts with an
// emission at t = 0 which is not recorded.
PhotonStream simulate_stream(const StageRates& rates, double duration, std::uint64_t seed, std::uint64_t stream_id = 0);

// `shards` independent streams of the given duration, shard k using stream
// id k.  The output does not depend on `threads` (0 = hardware concurrency).
std::vector<PhotonStream> simulate_shards(const StageRates& rates, double duration, std::uint64_t seed,
                                          std::size_t shards, std::size_t threads = 0);

// Adds N(0, sigma^2) to every timestamp, clamps into [0, duration], re-sorts.
// sigma == 0 returns the stream unchanged.
PhotonStream apply_jitter(const PhotonStream& stream, double sigma, std::uint64_t seed);

// Histogram estimate of g2 from forward delays.  Bin k holds ordered pairs
// with delay in [k dt, (k+1) dt) for k < floor(tau_max / dt), reported at the
// bin centre with
//     g2_k = C_k / (r^2 (T - tau_k) dt),  r = count / T,
// and standard error sqrt(C_k) under the same normalization.  Pairs are found
// with a forward sliding window, so the cost scales with the pairs inside
// tau_max.  The counts do not depend on `threads` (0 = hardware concurrency).
CorrelationCurve estimate_g2(const PhotonStream& stream, double bin_width, double tau_max, std::size_t threads = 1);

// Normalizes raw pooled counts into a curve (see estimate_g2).
CorrelationCurve curve_from_histogram(PairHistogram histogram, double bin_width);

// Pools counts, events, windows and segments, then renormalizes.  Throws
// ValidationError for an empty input, missing histograms or mismatched bins.
CorrelationCurve merge_histograms(std::span<const CorrelationCurve> curves);

// Default binning from the mean rate: dt = 0.01 / r, tau_max = 30 / r.
struct BinningDefaults {
    double bin_width;
    double tau_max;
};
BinningDefaults default_binning(double mean_rate) noexcept;

}  // namespace photonliq
