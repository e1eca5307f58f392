#include "photonliq/correlation_curve.hpp"

#include <algorithm>

#include "photonliq/errors.hpp"

namespace photonliq {

TauGrid TauGrid::span(double lo, double hi, std::size_t count) {
    if (count == 0) return {lo, 1.0, 0};
    if (count == 1) return {lo, 1.0, 1};
    if (!(hi > lo)) throw DomainError("TauGrid::span: need hi > lo");
    return {lo, (hi - lo) / static_cast<double>(count - 1), count};
}

std::vector<double> TauGrid::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = (*this)[i];
    return v;
}

CorrelationCurve CorrelationCurve::mirrored() const {
    CorrelationCurve out;
    out.bin_width = bin_width;
    out.histogram = histogram;
    const std::size_t n = tau.size();
    const std::size_t skip = (n > 0 && tau.front() == 0.0) ? 1 : 0;
    out.tau.reserve(2 * n);
    out.g2.reserve(2 * n);
    for (std::size_t i = n; i-- > skip;) {
        out.tau.push_back(-tau[i]);
        out.g2.push_back(g2[i]);
        if (has_errors()) out.errors.push_back(errors[i]);
    }
    out.tau.insert(out.tau.end(), tau.begin(), tau.end());
    out.g2.insert(out.g2.end(), g2.begin(), g2.end());
    out.errors.insert(out.errors.end(), errors.begin(), errors.end());
    return out;
}

CorrelationCurve sample_curve(const ExponentialMixture& mixture, const TauGrid& grid) {
    CorrelationCurve c;
    c.tau = grid.values();
    c.g2 = mixture.evaluate(c.tau);
    // g2 curves are non-negative; clip round-off below zero.
    if (mixture.baseline == 1.0)
        for (auto& v : c.g2) v = std::max(0.0, v);
    c.bin_width = grid.step;
    return c;
}

}  // namespace photonliq
