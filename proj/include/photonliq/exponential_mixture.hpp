#pragma once

#include <complex>
#include <span>
#include <vector>

namespace photonliq {

using complex = std::complex<double>;

// One term amplitude * tau^power * exp(-decay * tau).  power > 0 only appears
// for confluent (repeated) poles.
struct MixtureTerm {
    complex amplitude;
    complex decay;
    int power = 0;
};

// f(tau) = baseline + sum_k amplitude_k tau^power_k exp(-decay_k tau).
//
// Every analytic g2 route produces one of these; for normalized stationary g2
// the baseline is 1.  Phase-type densities reuse the type with baseline 0.
struct ExponentialMixture {
    double baseline = 1.0;
    std::vector<MixtureTerm> terms;

    complex evaluate_complex(double tau) const;

    // Real part of evaluate_complex; the imaginary part cancels for
    // conjugate-paired terms.
    double evaluate(double tau) const { return evaluate_complex(tau).real(); }
    double operator()(double tau) const { return evaluate(tau); }

    std::vector<double> evaluate(std::span<const double> taus) const;

    // g(tau) -> g(c tau): decays scale by c, power-k amplitudes by c^k.
    ExponentialMixture time_scaled(double c) const;

    // Sum of amplitudes of the power-0 terms plus baseline, i.e. f(0).
    complex value_at_zero() const;

    // True when every decay has Re >= -tol and every non-real term has a
    // conjugate partner (amplitude and decay) within tol.
    bool is_well_formed(double tol = 1e-10) const;
};

}  // namespace photonliq
