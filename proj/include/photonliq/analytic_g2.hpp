#pragma once

#include <functional>
#include <optional>

#include "photonliq/exponential_mixture.hpp"

namespace photonliq {

// Resonantly driven two-level emitter: decay rate and drive amplitude.
struct MollowParams {
    double gamma = 1.0;
    double omega = 0.0;
};

enum class MollowRegime { hyperbolic, threshold, oscillatory };

// |8 omega - gamma| / gamma below this selects the threshold branch.
inline constexpr double kMollowThresholdTolerance = 1e-6;

MollowRegime mollow_regime(const MollowParams& p);

// sqrt(gamma^2 - (8 omega)^2), real in the hyperbolic regime.
double mollow_gamma_m(const MollowParams& p);
// sqrt((8 omega)^2 - gamma^2), real in the oscillatory regime.
double mollow_omega_m(const MollowParams& p);

// Incoherently pumped two-level system: 1 - exp(-(P + gamma) tau).
double g2_incoherent_2ls(double pump, double gamma, double tau);

// Weak coherent drive: (1 - exp(-gamma tau))^2.
double g2_heitler(double gamma, double tau);

// Strong coherent drive.  Hyperbolic (cosh/sinh of gamma_M tau / 4),
// threshold (1 - e^{-3 gamma tau/4}(1 + 3 gamma tau / 4)) or oscillatory
// (cos/sin of Omega_M tau / 4) depending on mollow_regime().
double g2_mollow(const MollowParams& p, double tau);

// Erlang cascade of N equal stages through the N-th roots of unity:
// 1 + sum_{p=1}^{N-1} z^p exp(-gamma (1 - z^p) tau).
// For gamma tau < N the same sum is evaluated as the equivalent positive
// series N e^{-x} sum_m x^{mN-1}/(mN-1)!, which resolves plateau values far
// below double-precision cancellation of the direct sum.
double g2_erlang_cascade(int n, double gamma, double tau);

// Dedicated closed forms for N = 2, 3, 4.
double g2_cascade_closed_form(int n, double gamma, double tau);

// Leading small-tau term of the Erlang cascade, (N^2 / N!) (gamma tau)^{N-1}.
double g2_short_time(int n, double gamma, double tau);

// Mixture representations of the same curves.
ExponentialMixture incoherent_2ls_mixture(double pump, double gamma);
ExponentialMixture heitler_mixture(double gamma);
ExponentialMixture mollow_mixture(const MollowParams& p);
ExponentialMixture erlang_cascade_mixture(int n, double gamma);

// Exact first maximum of the oscillatory Mollow curve: tau_M = 4 pi / Omega_M,
// g_M = 1 + exp(-3 pi gamma / Omega_M).  Empty unless oscillatory.
struct Extremum {
    double tau;
    double value;
};
std::optional<Extremum> mollow_first_max(const MollowParams& p);

// First interior local maximum of f on [lo, hi].  The window is scanned on
// `samples` uniform points to bracket the maximum, which is then refined by
// golden-section search to a relative tau tolerance of 1e-9.  Returns nullopt
// when no interior maximum exists (e.g. monotone curves).
std::optional<Extremum> find_first_max(const std::function<double(double)>& f, double lo, double hi,
                                       std::size_t samples = 20000);

}  // namespace photonliq
