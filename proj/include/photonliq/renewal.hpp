#pragma once

#include <vector>

#include "photonliq/correlation_curve.hpp"
#include "photonliq/exponential_mixture.hpp"
#include "photonliq/phase_type.hpp"

namespace photonliq {

// A pole p of the Laplace-space g2 together with its time-domain
// coefficients: the pole contributes sum_k coefficients[k] tau^k e^{p tau}.
// Simple poles have a single coefficient, the residue.
struct RenewalPole {
    complex location;
    std::vector<complex> coefficients;

    int multiplicity() const noexcept { return static_cast<int>(coefficients.size()); }
    complex residue() const { return coefficients.front(); }
};

// Non-zero poles of g2~(s) = (1/r) w~/(1 - w~), in conjugate pairs.
struct PoleSet {
    std::vector<RenewalPole> poles;

    // Total multiplicity, N - 1 for N stages.
    int order() const noexcept;
    // sum of the tau^0 coefficients; -1 for perfect antibunching.
    complex residue_sum() const;
};

// Roots closer than this (relative) are treated as one repeated pole.
inline constexpr double kPoleClusterTolerance = 1e-7;

// Laplace transform of g2: (1/r) w~(s) / (1 - w~(s)), r the mean emission rate.
// Throws PoleError at s = 0, at s = -rate_i and at roots of 1 - w~.
complex g2_laplace(const StageRates& rates, complex s);

// Roots of prod(s + rate_i) - prod(rate_i) other than s = 0, with their
// coefficients.  Initial roots are the eigenvalues of the cyclic renewal
// generator (whose characteristic polynomial is exactly that expression);
// they are polished by Newton iteration on the polynomial divided by s,
// which keeps the iteration away from the known zero root.  Throws
// NumericError if polishing does not converge.
PoleSet find_poles(const StageRates& rates);

// 1 + sum over poles, as a mixture.
ExponentialMixture renewal_mixture(const StageRates& rates);

CorrelationCurve g2_from_renewal(const StageRates& rates, const TauGrid& grid);

}  // namespace photonliq
