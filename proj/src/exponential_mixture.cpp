#include "photonliq/exponential_mixture.hpp"

#include <algorithm>
#include <cmath>

namespace photonliq {

complex ExponentialMixture::evaluate_complex(double tau) const {
    complex sum{baseline, 0.0};
    for (const auto& t : terms) {
        complex term = t.amplitude * std::exp(-t.decay * tau);
        if (t.power > 0) term *= std::pow(tau, t.power);
        sum += term;
    }
    return sum;
}

std::vector<double> ExponentialMixture::evaluate(std::span<const double> taus) const {
    std::vector<double> out(taus.size());
    std::transform(taus.begin(), taus.end(), out.begin(), [this](double t) { return evaluate(t); });
    return out;
}

ExponentialMixture ExponentialMixture::time_scaled(double c) const {
    ExponentialMixture out{baseline, terms};
    for (auto& t : out.terms) {
        t.decay *= c;
        t.amplitude *= std::pow(c, t.power);
    }
    return out;
}

complex ExponentialMixture::value_at_zero() const {
    complex sum{baseline, 0.0};
    for (const auto& t : terms)
        if (t.power == 0) sum += t.amplitude;
    return sum;
}

bool ExponentialMixture::is_well_formed(double tol) const {
    for (const auto& t : terms) {
        if (t.decay.real() < -tol) return false;
        const double scale = std::max(1.0, std::abs(t.decay));
        if (std::abs(t.decay.imag()) <= tol * scale && std::abs(t.amplitude.imag()) <= tol * std::max(1.0, std::abs(t.amplitude)))
            continue;
        const bool paired = std::any_of(terms.begin(), terms.end(), [&](const MixtureTerm& o) {
            return o.power == t.power && std::abs(o.decay - std::conj(t.decay)) <= tol * scale &&
                   std::abs(o.amplitude - std::conj(t.amplitude)) <= tol * std::max(1.0, std::abs(t.amplitude));
        });
        if (!paired) return false;
    }
    return true;
}

}  // namespace photonliq
