#include "photonliq/analytic_g2.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "photonliq/errors.hpp"

namespace photonliq {
namespace {

void require_tau(double tau, const char* where) {
    if (!(tau >= 0.0)) throw DomainError(fmt::format("{}: tau = {} must be >= 0", where, tau));
}

void require_rate(double rate, const char* name, const char* where) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw DomainError(fmt::format("{}: {} = {} must be positive", where, name, rate));
}

void require_mollow(const MollowParams& p) {
    if (!(p.gamma >= 0.0) || !(p.omega >= 0.0) || !std::isfinite(p.gamma) || !std::isfinite(p.omega))
        throw DomainError("MollowParams: gamma and omega must be finite and >= 0");
    if (p.gamma == 0.0 && p.omega == 0.0) throw DomainError("MollowParams: gamma and omega are both zero");
}

// e^{i 2 pi p / N} from the exact angle.
complex root_of_unity(int p, int n) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

// g2 is a probability ratio; round-off may dip a few ulp below zero.
double nonnegative(double g) { return std::max(0.0, g); }

// Summing the roots of unity in closed form collapses the cascade sum to
//   N e^{-x} sum_{m>=1} x^{mN-1} / (mN-1)!,
// a positive series that keeps full relative precision deep in the plateau,
// where the direct sum cancels down to round-off.
double erlang_cascade_series(int n, double x) {
    double term = 1.0;
    for (int k = 1; k < n; ++k) term *= x / k;
    double sum = 0.0;
    for (int m = 1;; ++m) {
        sum += term;
        if (term <= 1e-17 * sum && m * n > x) break;
        for (int k = m * n; k < (m + 1) * n; ++k) term *= x / k;
        if (term == 0.0) break;
    }
    return n * std::exp(-x) * sum;
}

}  // namespace

MollowRegime mollow_regime(const MollowParams& p) {
    require_mollow(p);
    const double drive = 8.0 * p.omega;
    if (p.gamma > 0.0 && std::abs(drive - p.gamma) / p.gamma < kMollowThresholdTolerance) return MollowRegime::threshold;
    return drive < p.gamma ? MollowRegime::hyperbolic : MollowRegime::oscillatory;
}

double mollow_gamma_m(const MollowParams& p) {
    const double drive = 8.0 * p.omega;
    return std::sqrt(std::max(0.0, (p.gamma - drive) * (p.gamma + drive)));
}

double mollow_omega_m(const MollowParams& p) {
    const double drive = 8.0 * p.omega;
    return std::sqrt(std::max(0.0, (drive - p.gamma) * (drive + p.gamma)));
}

double g2_incoherent_2ls(double pump, double gamma, double tau) {
    require_rate(pump, "pump", "g2_incoherent_2ls");
    require_rate(gamma, "gamma", "g2_incoherent_2ls");
    require_tau(tau, "g2_incoherent_2ls");
    return nonnegative(-std::expm1(-(pump + gamma) * tau));
}

double g2_heitler(double gamma, double tau) {
    require_rate(gamma, "gamma", "g2_heitler");
    require_tau(tau, "g2_heitler");
    const double rise = -std::expm1(-gamma * tau);
    return rise * rise;
}

double g2_mollow(const MollowParams& p, double tau) {
    require_tau(tau, "g2_mollow");
    const double decay = std::exp(-0.75 * p.gamma * tau);
    switch (mollow_regime(p)) {
        case MollowRegime::threshold:
            return nonnegative(1.0 - decay * (1.0 + 0.75 * p.gamma * tau));
        case MollowRegime::hyperbolic: {
            const double gm = mollow_gamma_m(p);
            const double x = 0.25 * gm * tau;
            return nonnegative(1.0 - decay * (std::cosh(x) + 3.0 * p.gamma / gm * std::sinh(x)));
        }
        case MollowRegime::oscillatory: {
            const double om = mollow_omega_m(p);
            const double x = 0.25 * om * tau;
            return nonnegative(1.0 - decay * (std::cos(x) + 3.0 * p.gamma / om * std::sin(x)));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double g2_erlang_cascade(int n, double gamma, double tau) {
    if (n < 1) throw DomainError(fmt::format("g2_erlang_cascade: N = {} must be >= 1", n));
    require_rate(gamma, "gamma", "g2_erlang_cascade");
    require_tau(tau, "g2_erlang_cascade");
    const double x = gamma * tau;
    if (n > 1 && x < static_cast<double>(n)) return erlang_cascade_series(n, x);
    complex sum{1.0, 0.0};
    for (int p = 1; p < n; ++p) {
        const complex z = root_of_unity(p, n);
        sum += z * std::exp(-gamma * (1.0 - z) * tau);
    }
    return nonnegative(sum.real());
}

double g2_cascade_closed_form(int n, double gamma, double tau) {
    require_rate(gamma, "gamma", "g2_cascade_closed_form");
    require_tau(tau, "g2_cascade_closed_form");
    const double x = gamma * tau;
    switch (n) {
        case 2:
            return -std::expm1(-2.0 * x);
        case 3:
            return nonnegative(1.0 - 2.0 * std::sin(std::sqrt(3.0) / 2.0 * x + std::numbers::pi / 6.0) * std::exp(-1.5 * x));
        case 4:
            return nonnegative(1.0 - std::exp(-2.0 * x) - 2.0 * std::exp(-x) * std::sin(x));
        default:
            throw DomainError(fmt::format("g2_cascade_closed_form: no closed form for N = {} (2, 3, 4)", n));
    }
}

double g2_short_time(int n, double gamma, double tau) {
    if (n < 2) throw DomainError(fmt::format("g2_short_time: N = {} must be >= 2", n));
    // N^2 / N! = N / (N-1)!
    const double prefactor = static_cast<double>(n) / std::tgamma(static_cast<double>(n));
    return prefactor * std::pow(gamma * tau, n - 1);
}

ExponentialMixture incoherent_2ls_mixture(double pump, double gamma) {
    require_rate(pump, "pump", "incoherent_2ls_mixture");
    require_rate(gamma, "gamma", "incoherent_2ls_mixture");
    return {1.0, {{-1.0, pump + gamma, 0}}};
}

ExponentialMixture heitler_mixture(double gamma) {
    require_rate(gamma, "gamma", "heitler_mixture");
    return {1.0, {{-2.0, gamma, 0}, {1.0, 2.0 * gamma, 0}}};
}

ExponentialMixture mollow_mixture(const MollowParams& p) {
    const auto regime = mollow_regime(p);
    const double a = 0.75 * p.gamma;
    if (regime == MollowRegime::threshold) return {1.0, {{-1.0, a, 0}, {-a, a, 1}}};
    // cosh(b tau) + c sinh(b tau) with b = gamma_M / 4 (imaginary when oscillatory).
    const complex gm = regime == MollowRegime::hyperbolic ? complex{mollow_gamma_m(p), 0.0}
                                                          : complex{0.0, mollow_omega_m(p)};
    const complex c = 3.0 * p.gamma / gm;
    const complex b = 0.25 * gm;
    return {1.0, {{-0.5 * (1.0 + c), a - b, 0}, {-0.5 * (1.0 - c), a + b, 0}}};
}

ExponentialMixture erlang_cascade_mixture(int n, double gamma) {
    if (n < 1) throw DomainError(fmt::format("erlang_cascade_mixture: N = {} must be >= 1", n));
    require_rate(gamma, "gamma", "erlang_cascade_mixture");
    ExponentialMixture m;
    for (int p = 1; p < n; ++p) {
        const complex z = root_of_unity(p, n);
        m.terms.push_back({z, gamma * (1.0 - z), 0});
    }
    return m;
}

std::optional<Extremum> mollow_first_max(const MollowParams& p) {
    if (mollow_regime(p) != MollowRegime::oscillatory) return std::nullopt;
    const double om = mollow_omega_m(p);
    return Extremum{4.0 * std::numbers::pi / om, 1.0 + std::exp(-3.0 * std::numbers::pi * p.gamma / om)};
}

std::optional<Extremum> find_first_max(const std::function<double(double)>& f, double lo, double hi,
                                       std::size_t samples) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("find_first_max: need 0 < lo < hi");
    if (samples < 3) samples = 3;

    const double step = (hi - lo) / static_cast<double>(samples - 1);
    auto at = [&](std::size_t i) { return lo + step * static_cast<double>(i); };
    const auto noise = [](double v) { return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v)); };

    double prev = f(at(0));
    double cur = f(at(1));
    std::size_t found = 0;
    for (std::size_t i = 1; i + 1 < samples; ++i) {
        const double next = f(at(i + 1));
        if (cur > prev + noise(cur) && cur >= next + noise(cur)) {
            found = i;
            break;
        }
        prev = cur;
        cur = next;
    }
    if (found == 0) return std::nullopt;

    // Golden-section refinement on the bracket [x_{i-1}, x_{i+1}].
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = at(found - 1);
    double b = at(found + 1);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-9 * 0.5 * (a + b)) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double tau = 0.5 * (a + b);
    return Extremum{tau, f(tau)};
}

}  // namespace photonliq
