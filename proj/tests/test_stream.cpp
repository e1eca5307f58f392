#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "photonliq/analytic_g2.hpp"
#include "photonliq/errors.hpp"
#include "photonliq/stream.hpp"

using namespace photonliq;

namespace {

// Deviation of an estimate from an oracle in units of the standard error the
// oracle itself predicts for each bin (Pearson).  Using the observed counts
// instead breaks down in bins where the expected count is near zero.
struct Agreement {
    double max_sigma = 0.0;
    double reduced_chi2 = 0.0;
    std::size_t bins = 0;
};

template <class Oracle>
Agreement compare_to_oracle(const CorrelationCurve& c, Oracle&& oracle, double tau_hi = 1e300) {
    const auto& h = *c.histogram;
    const double rate = static_cast<double>(h.events) / h.window;
    Agreement a;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < c.size() && c.tau[k] <= tau_hi; ++k) {
        const double norm = rate * rate * (h.window - static_cast<double>(h.segments) * c.tau[k]) * c.bin_width;
        const double expected = oracle(c.tau[k]) * norm;
        const double sigma = std::sqrt(std::max(expected, 1.0));
        const double dev = std::abs(static_cast<double>(h.counts[k]) - expected) / sigma;
        a.max_sigma = std::max(a.max_sigma, dev);
        if (expected >= 5.0) {
            chi2 += dev * dev;
            ++a.bins;
        }
    }
    a.reduced_chi2 = a.bins ? chi2 / static_cast<double>(a.bins) : 0.0;
    return a;
}

}  // namespace

TEST_CASE("PhotonStream validation names the offending index") {
    CHECK_NOTHROW(PhotonStream({0.0, 1.0, 2.0}, 2.0));
    CHECK_NOTHROW(PhotonStream({}, 0.0));
    try {
        PhotonStream({0.1, 0.5, 0.5, 0.9}, 1.0);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
    CHECK_THROWS_AS(PhotonStream({0.1, 1.5}, 1.0), ValidationError);
    CHECK_THROWS_AS(PhotonStream({-0.1, 0.5}, 1.0), ValidationError);
    CHECK_THROWS_AS(PhotonStream({0.1}, std::nan("")), ValidationError);
}

TEST_CASE("simulated counts follow the renewal rate") {
    SUBCASE("Poisson") {
        const auto s = simulate_stream(StageRates({1.0}), 1e6, 1);
        CHECK(std::abs(static_cast<double>(s.size()) - 1e6) < 5.0 * 1e3);
    }
    SUBCASE("three equal steps") {
        const auto s = simulate_stream(StageRates::erlang(3, 1.0), 3e6, 2);
        // Renewal count variance: T var(w) / mean(w)^3 = 3e6 * 3 / 27.
        CHECK(std::abs(static_cast<double>(s.size()) - 1e6) < 5.0 * std::sqrt(3e6 * 3.0 / 27.0));
    }
    SUBCASE("short window may be empty") {
        const auto s = simulate_stream(StageRates({1.0}), 0.001, 1);
        CHECK(s.size() <= 1);
        CHECK(s.duration() == 0.001);
    }
    CHECK_THROWS_AS(simulate_stream(StageRates({1.0}), 0.0, 1), DomainError);
}

TEST_CASE("simulation is deterministic and streams are independent") {
    const StageRates rates({0.5, 2.0});
    const auto a = simulate_stream(rates, 1e4, 7);
    const auto b = simulate_stream(rates, 1e4, 7);
    CHECK(std::equal(a.timestamps().begin(), a.timestamps().end(), b.timestamps().begin(), b.timestamps().end()));
    const auto c = simulate_stream(rates, 1e4, 7, 1);
    const auto d = simulate_stream(rates, 1e4, 8);
    CHECK_FALSE(std::equal(a.timestamps().begin(), a.timestamps().end(), c.timestamps().begin(), c.timestamps().end()));
    CHECK_FALSE(std::equal(a.timestamps().begin(), a.timestamps().end(), d.timestamps().begin(), d.timestamps().end()));
    CHECK(a.metadata().seed == 7);
    CHECK(a.metadata().rates == std::vector<double>{0.5, 2.0});
}

TEST_CASE("shards do not depend on the thread count") {
    const auto serial = simulate_shards(StageRates::erlang(3, 1.0), 2e4, 3, 5, 1);
    const auto parallel = simulate_shards(StageRates::erlang(3, 1.0), 2e4, 3, 5, 3);
    REQUIRE(serial.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(serial[k].metadata().stream_id == k);
        const auto x = serial[k].timestamps(), y = parallel[k].timestamps();
        CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
        const auto single = simulate_stream(StageRates::erlang(3, 1.0), 2e4, 3, k);
        CHECK(std::equal(x.begin(), x.end(), single.timestamps().begin(), single.timestamps().end()));
    }
}

TEST_CASE("estimator counts by hand") {
    // dyadic times so no delay lands on a bin edge by rounding
    const PhotonStream s({0.0, 0.125, 0.375, 1.0, 1.0625}, 2.0);
    const auto c = estimate_g2(s, 0.125, 0.625);
    REQUIRE(c.size() == 5);
    const auto& h = *c.histogram;
    // in range: .125 .375 .25 .0625 -> bins 1, 3, 2, 0; .625 is excluded
    CHECK(h.counts == std::vector<std::uint64_t>{1, 1, 1, 1, 0});
    CHECK(c.tau[0] == doctest::Approx(0.0625));
    const double r = 5.0 / 2.0;
    CHECK(c.g2[1] == doctest::Approx(1.0 / (r * r * (2.0 - 0.1875) * 0.125)).epsilon(1e-14));
    CHECK(c.errors[1] == doctest::Approx(c.g2[1]).epsilon(1e-14));
    CHECK(c.errors[4] == 0.0);
}

TEST_CASE("estimator argument checks") {
    const auto s = simulate_stream(StageRates({1.0}), 100.0, 1);
    CHECK_THROWS_AS(estimate_g2(s, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(estimate_g2(s, 0.1, 0.1), DomainError);
    CHECK_THROWS_AS(estimate_g2(s, 0.1, 100.0), DomainError);
    CHECK_THROWS_AS(estimate_g2(PhotonStream({}, 10.0), 0.1, 1.0), ValidationError);
    const auto d = default_binning(0.25);
    CHECK(d.bin_width == doctest::Approx(0.04));
    CHECK(d.tau_max == doctest::Approx(120.0));
}

TEST_CASE("Poisson stream is flat") {
    const auto s = simulate_stream(StageRates({1.0}), 1e6, 1);
    const auto c = estimate_g2(s, 0.05, 5.0);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c.g2[k] - 1.0) < 5.0 * c.errors[k]);
    const auto a = compare_to_oracle(c, [](double) { return 1.0; });
    CHECK(a.reduced_chi2 < 1.5);
}

TEST_CASE("three-step cascade matches the closed form") {
    const auto s = simulate_stream(StageRates::erlang(3, 1.0), 3e6, 2);
    const auto c = estimate_g2(s, 0.02, 10.0);
    const auto a = compare_to_oracle(c, [](double t) { return g2_cascade_closed_form(3, 1.0, t); });
    CHECK(a.max_sigma < 5.0);
    CHECK(a.reduced_chi2 < 1.5);
    CHECK(a.bins > 400);
}

TEST_CASE("the estimator is consistent for N in {1, 2, 3, 6, 26}") {
    for (int n : {1, 2, 3, 6, 26}) {
        CAPTURE(n);
        const double rate = 1.0 / n;
        const auto bins = default_binning(rate);
        const auto s = simulate_stream(StageRates::erlang(static_cast<std::size_t>(n), 1.0), 1e6 / rate, 100 + n);
        const auto c = estimate_g2(s, bins.bin_width, bins.tau_max);
        const auto a = compare_to_oracle(c, [n](double t) { return g2_erlang_cascade(n, 1.0, t); });
        CHECK(a.max_sigma < 5.0);
        CHECK(a.reduced_chi2 < 1.5);
    }
}

TEST_CASE("a 25-step stream peaks near the mean spacing") {
    const auto s = simulate_stream(StageRates::erlang(25, 1.0), 5e6, 4);
    const auto c = estimate_g2(s, 0.25, 40.0);
    std::size_t best = 0;
    for (std::size_t k = 0; k < c.size() && c.tau[k] < 37.0; ++k)
        if (c.g2[k] > c.g2[best]) best = k;
    CHECK(std::abs(c.tau[best] - 24.0) < 1.5);
    CHECK(c.g2[best] > 1.05);
}

TEST_CASE("threads partition the work without changing counts") {
    const auto s = simulate_stream(StageRates::erlang(2, 1.0), 2e5, 9);
    const auto one = estimate_g2(s, 0.05, 8.0, 1);
    for (std::size_t threads : {2u, 3u, 7u}) {
        const auto many = estimate_g2(s, 0.05, 8.0, threads);
        CHECK(many.histogram->counts == one.histogram->counts);
        CHECK(many.g2 == one.g2);
    }
}

TEST_CASE("first bin follows the plateau law") {
    // Ratio of first-bin estimates when the bin halves: 2^(N-1) within a factor 2.
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        const auto s = simulate_stream(StageRates::erlang(static_cast<std::size_t>(n), 1.0), 2e6 * n, 20 + n);
        std::vector<double> first;
        for (double dt : {0.8, 0.4, 0.2}) first.push_back(estimate_g2(s, dt, 2.0 * dt).g2[0]);
        const double expected = std::pow(2.0, n - 1);
        for (std::size_t i = 0; i + 1 < first.size(); ++i) {
            const double ratio = first[i] / first[i + 1];
            CHECK(ratio > expected / 2.0);
            CHECK(ratio < expected * 2.0);
        }
    }
}

TEST_CASE("time rescaling leaves the curve unchanged") {
    const double c = 4.0;
    const auto slow = estimate_g2(simulate_stream(StageRates::erlang(3, 1.0), 3e5, 31), 0.1, 10.0);
    const auto fast = estimate_g2(simulate_stream(StageRates::erlang(3, c), 3e5 / c, 32), 0.1 / c, 10.0 / c);
    REQUIRE(slow.size() == fast.size());
    double chi2 = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < slow.size(); ++k) {
        CHECK(fast.tau[k] * c == doctest::Approx(slow.tau[k]).epsilon(1e-12));
        const double var = slow.errors[k] * slow.errors[k] + fast.errors[k] * fast.errors[k];
        if (var == 0.0) continue;
        const double z = (slow.g2[k] - fast.g2[k]) / std::sqrt(var);
        CHECK(std::abs(z) < 5.0);
        chi2 += z * z;
        ++used;
    }
    CHECK(chi2 / static_cast<double>(used) < 1.5);
}

TEST_CASE("jitter") {
    SUBCASE("zero sigma is the identity") {
        const auto s = simulate_stream(StageRates::erlang(2, 1.0), 1e3, 3);
        const auto j = apply_jitter(s, 0.0, 1);
        CHECK(std::equal(s.timestamps().begin(), s.timestamps().end(), j.timestamps().begin(), j.timestamps().end()));
        CHECK_THROWS_AS(apply_jitter(s, -1.0, 1), DomainError);
    }
    SUBCASE("output stays ordered and inside the window") {
        const auto s = simulate_stream(StageRates({5.0}), 1e3, 3);
        const auto j = apply_jitter(s, 2.0, 1);
        CHECK(j.size() == s.size());
        const auto t = j.timestamps();
        CHECK(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());
        CHECK(t.front() >= 0.0);
        CHECK(t.back() <= j.duration());
        CHECK(j.metadata().jitter == 2.0);
    }
    SUBCASE("Poisson stays Poisson") {
        const auto j = apply_jitter(simulate_stream(StageRates({1.0}), 2e5, 5), 0.1, 6);
        const auto c = estimate_g2(j, 0.05, 3.0);
        const auto a = compare_to_oracle(c, [](double) { return 1.0; });
        CHECK(a.max_sigma < 5.0);
        CHECK(a.reduced_chi2 < 1.5);
    }
    SUBCASE("flat short-time correlations resist jitter") {
        const auto two = apply_jitter(simulate_stream(StageRates::erlang(2, 1.0), 4e5, 7), 0.1, 8);
        const auto six = apply_jitter(simulate_stream(StageRates::erlang(6, 1.0), 1.2e6, 9), 0.1, 10);
        const double g_two = estimate_g2(two, 0.02, 1.0).g2[0];
        const double g_six = estimate_g2(six, 0.02, 1.0).g2[0];
        CHECK(g_two > 0.1);
        CHECK(g_six < g_two);
    }
}

TEST_CASE("merging histograms") {
    const auto s = simulate_stream(StageRates::erlang(3, 1.0), 3e4, 12);
    const auto c = estimate_g2(s, 0.1, 6.0);

    SUBCASE("with itself") {
        const std::vector<CorrelationCurve> twice{c, c};
        const auto m = merge_histograms(twice);
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK(m.g2[k] == doctest::Approx(c.g2[k]).epsilon(1e-12));
            if (c.g2[k] > 0.0) CHECK(m.errors[k] / m.g2[k] == doctest::Approx(c.errors[k] / c.g2[k] / std::sqrt(2.0)).epsilon(1e-12));
        }
        CHECK(m.histogram->segments == 2);
    }
    SUBCASE("pooled counts equal counts on the joined record") {
        const auto t = simulate_stream(StageRates::erlang(3, 1.0), 2e4, 13);
        const double gap = 10.0;
        std::vector<double> joined(s.timestamps().begin(), s.timestamps().end());
        for (double x : t.timestamps()) joined.push_back(x + s.duration() + gap);
        const PhotonStream both(std::move(joined), s.duration() + gap + t.duration());
        const auto whole = estimate_g2(both, 0.1, 6.0);
        const std::vector<CorrelationCurve> parts{c, estimate_g2(t, 0.1, 6.0)};
        const auto m = merge_histograms(parts);
        CHECK(m.histogram->counts == whole.histogram->counts);
        CHECK(m.histogram->events == whole.histogram->events);
        CHECK(m.histogram->window == doctest::Approx(s.duration() + t.duration()));
    }
    SUBCASE("eight streams against one long stream") {
        const auto shards = simulate_shards(StageRates::erlang(3, 1.0), 3e5, 40, 8, 0);
        std::vector<CorrelationCurve> parts;
        for (const auto& sh : shards) parts.push_back(estimate_g2(sh, 0.05, 10.0));
        const auto m = merge_histograms(parts);
        const auto single = estimate_g2(simulate_stream(StageRates::erlang(3, 1.0), 8 * 3e5, 41), 0.05, 10.0);
        double chi2 = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double z = (m.g2[k] - single.g2[k]) / std::hypot(m.errors[k], single.errors[k]);
            CHECK(std::abs(z) < 5.0);
            chi2 += z * z;
        }
        CHECK(chi2 / static_cast<double>(m.size() - 1) < 1.5);
        const auto a = compare_to_oracle(m, [](double t) { return g2_cascade_closed_form(3, 1.0, t); });
        CHECK(a.max_sigma < 5.0);
    }
    SUBCASE("failures") {
        CHECK_THROWS_AS(merge_histograms({}), ValidationError);
        const std::vector<CorrelationCurve> mismatch{c, estimate_g2(s, 0.1, 5.0)};
        CHECK_THROWS_AS(merge_histograms(mismatch), ShapeError);
        const std::vector<CorrelationCurve> other_bin{c, estimate_g2(s, 0.2, 6.0)};
        CHECK_THROWS_AS(merge_histograms(other_bin), ShapeError);
        auto bare = c;
        bare.histogram.reset();
        const std::vector<CorrelationCurve> missing{c, bare};
        CHECK_THROWS_AS(merge_histograms(missing), ValidationError);
    }
}

TEST_CASE("mirroring") {
    const auto c = estimate_g2(PhotonStream({0.0, 0.15, 0.35}, 2.0), 0.1, 0.3);
    const auto m = c.mirrored();
    CHECK(m.size() == 2 * c.size());
    CHECK(m.tau.front() == doctest::Approx(-c.tau.back()));
    CHECK(m.g2.front() == c.g2.back());
    CHECK(std::is_sorted(m.tau.begin(), m.tau.end()));
}
