#include "photonliq/stream.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "photonliq/errors.hpp"

namespace photonliq {
namespace {

std::size_t resolve_threads(std::size_t threads, std::size_t work_items) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(threads, work_items));
}

// Runs body(begin, end, slot) over [0, n) split into `parts` contiguous slices.
template <typename Body>
void parallel_slices(std::size_t n, std::size_t parts, Body&& body) {
    if (parts <= 1) {
        body(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(parts);
    for (std::size_t p = 0; p < parts; ++p) {
        const std::size_t begin = n * p / parts;
        const std::size_t end = n * (p + 1) / parts;
        pool.emplace_back([&body, begin, end, p] { body(begin, end, p); });
    }
    for (auto& t : pool) t.join();
}

// Restores strict ordering after clamping/sorting (ties only occur at the
// window edges or through round-off).
void enforce_strict_order(std::vector<double>& t, double duration) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] <= t[i - 1]) t[i] = std::nextafter(t[i - 1], std::numeric_limits<double>::infinity());
    if (!t.empty() && t.back() > duration) {
        t.back() = duration;
        for (std::size_t i = t.size() - 1; i-- > 0;)
            if (t[i] >= t[i + 1]) t[i] = std::nextafter(t[i + 1], -std::numeric_limits<double>::infinity());
    }
}

}  // namespace

PhotonStream::PhotonStream(std::vector<double> timestamps, double duration, StreamMetadata metadata)
    : timestamps_(std::move(timestamps)), duration_(duration), metadata_(std::move(metadata)) {
    if (!(duration_ >= 0.0) || !std::isfinite(duration_))
        throw ValidationError(fmt::format("PhotonStream: duration {} must be finite and >= 0", duration_));
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        const double t = timestamps_[i];
        if (!(t >= 0.0) || !(t <= duration_))
            throw ValidationError(fmt::format("PhotonStream: timestamp[{}] = {} outside [0, {}]", i, t, duration_));
        if (i > 0 && !(t > timestamps_[i - 1]))
            throw ValidationError(fmt::format("PhotonStream: timestamps not strictly increasing at index {} ({} after {})",
                                              i, t, timestamps_[i - 1]));
    }
}

PhotonStream simulate_stream(const StageRates& rates, double duration, std::uint64_t seed, std::uint64_t stream_id) {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw DomainError(fmt::format("simulate_stream: duration {} must be positive", duration));
    Rng rng(seed, stream_id);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(duration * mean_rate(rates) * 1.05) + 16);
    double t = 0.0;
    for (;;) {
        double next = t + sample_interval(rates, rng);
        if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
        if (next > duration) break;
        times.push_back(next);
        t = next;
    }
    StreamMetadata meta;
    meta.rates.assign(rates.values().begin(), rates.values().end());
    meta.seed = seed;
    meta.stream_id = stream_id;
    return PhotonStream(std::move(times), duration, std::move(meta));
}

std::vector<PhotonStream> simulate_shards(const StageRates& rates, double duration, std::uint64_t seed,
                                          std::size_t shards, std::size_t threads) {
    std::vector<PhotonStream> out(shards);
    const std::size_t parts = resolve_threads(threads, shards);
    parallel_slices(shards, parts, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t k = begin; k < end; ++k) out[k] = simulate_stream(rates, duration, seed, k);
    });
    return out;
}

PhotonStream apply_jitter(const PhotonStream& stream, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw DomainError(fmt::format("apply_jitter: sigma {} must be >= 0", sigma));
    if (sigma == 0.0) return stream;
    Rng rng(seed, 0x6a6974746572ULL);  // "jitter"
    const double duration = stream.duration();
    std::vector<double> t(stream.timestamps().begin(), stream.timestamps().end());
    for (auto& x : t) x = std::clamp(x + rng.normal(sigma), 0.0, duration);
    std::sort(t.begin(), t.end());
    enforce_strict_order(t, duration);
    StreamMetadata meta = stream.metadata();
    meta.jitter = sigma;
    meta.jitter_seed = seed;
    return PhotonStream(std::move(t), duration, std::move(meta));
}

CorrelationCurve curve_from_histogram(PairHistogram histogram, double bin_width) {
    if (histogram.events == 0 || !(histogram.window > 0.0))
        throw ValidationError("curve_from_histogram: no events to normalize against");
    CorrelationCurve c;
    const std::size_t bins = histogram.counts.size();
    c.tau.resize(bins);
    c.g2.resize(bins);
    c.errors.resize(bins);
    c.bin_width = bin_width;
    const double rate = static_cast<double>(histogram.events) / histogram.window;
    for (std::size_t k = 0; k < bins; ++k) {
        const double tau = (static_cast<double>(k) + 0.5) * bin_width;
        const double exposure = histogram.window - static_cast<double>(histogram.segments) * tau;
        const double norm = 1.0 / (rate * rate * exposure * bin_width);
        const auto count = static_cast<double>(histogram.counts[k]);
        c.tau[k] = tau;
        c.g2[k] = count * norm;
        c.errors[k] = std::sqrt(count) * norm;
    }
    c.histogram = std::move(histogram);
    return c;
}

CorrelationCurve estimate_g2(const PhotonStream& stream, double bin_width, double tau_max, std::size_t threads) {
    if (!(bin_width > 0.0)) throw DomainError(fmt::format("estimate_g2: bin width {} must be positive", bin_width));
    if (!(tau_max > bin_width)) throw DomainError(fmt::format("estimate_g2: tau_max {} must exceed the bin width", tau_max));
    if (stream.empty()) throw ValidationError("estimate_g2: empty stream");
    if (!(tau_max < stream.duration()))
        throw DomainError(fmt::format("estimate_g2: tau_max {} must be below the stream duration {}", tau_max, stream.duration()));

    const auto bins = static_cast<std::size_t>(std::floor(tau_max / bin_width + 1e-9));
    const double reach = static_cast<double>(bins) * bin_width;
    const auto t = stream.timestamps();
    const std::size_t n = t.size();

    const std::size_t parts = resolve_threads(threads, n);
    std::vector<std::vector<std::uint64_t>> partial(parts, std::vector<std::uint64_t>(bins, 0));
    parallel_slices(n, parts, [&](std::size_t begin, std::size_t end, std::size_t slot) {
        auto& counts = partial[slot];
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double delay = t[j] - t[i];
                if (delay >= reach) break;
                const auto b = static_cast<std::size_t>(delay / bin_width);
                if (b < bins) ++counts[b];
            }
        }
    });

    PairHistogram h;
    h.counts.assign(bins, 0);
    for (const auto& p : partial)
        for (std::size_t k = 0; k < bins; ++k) h.counts[k] += p[k];
    h.events = n;
    h.window = stream.duration();
    h.segments = 1;
    return curve_from_histogram(std::move(h), bin_width);
}

CorrelationCurve merge_histograms(std::span<const CorrelationCurve> curves) {
    if (curves.empty()) throw ValidationError("merge_histograms: nothing to merge");
    const auto& first = curves.front();
    if (!first.histogram) throw ValidationError("merge_histograms: curve 0 carries no raw counts");
    PairHistogram pooled;
    pooled.counts.assign(first.histogram->counts.size(), 0);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        if (!c.histogram) throw ValidationError(fmt::format("merge_histograms: curve {} carries no raw counts", i));
        if (c.bin_width != first.bin_width || c.histogram->counts.size() != pooled.counts.size())
            throw ShapeError(fmt::format("merge_histograms: curve {} grid ({} bins of {}) differs from curve 0 ({} bins of {})",
                                              i, c.histogram->counts.size(), c.bin_width, pooled.counts.size(),
                                              first.bin_width));
        for (std::size_t k = 0; k < pooled.counts.size(); ++k) pooled.counts[k] += c.histogram->counts[k];
        pooled.events += c.histogram->events;
        pooled.window += c.histogram->window;
        pooled.segments += c.histogram->segments;
    }
    return curve_from_histogram(std::move(pooled), first.bin_width);
}

BinningDefaults default_binning(double mean_rate) noexcept { return {0.01 / mean_rate, 30.0 / mean_rate}; }

}  // namespace photonliq
