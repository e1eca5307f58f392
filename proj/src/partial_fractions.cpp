#include "photonliq/partial_fractions.hpp"

#include "photonliq/errors.hpp"

namespace photonliq {
namespace {

// Taylor coefficients (order < len) of (d + u)^{-m} in u.
std::vector<complex> inverse_power_series(complex d, int m, int len) {
    std::vector<complex> c(static_cast<std::size_t>(len));
    const complex inv_d = 1.0 / d;
    complex term = std::pow(inv_d, m);
    for (int n = 0; n < len; ++n) {
        c[static_cast<std::size_t>(n)] = term;
        // binom(-m, n+1) / binom(-m, n) = -(m + n) / (n + 1)
        term *= -static_cast<double>(m + n) / static_cast<double>(n + 1) * inv_d;
    }
    return c;
}

std::vector<complex> truncated_product(const std::vector<complex>& a, const std::vector<complex>& b) {
    std::vector<complex> out(a.size(), complex{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace

std::vector<MixtureTerm> inverse_laplace_rational(complex numerator, std::span<const PoleCluster> poles) {
    std::vector<MixtureTerm> terms;
    for (std::size_t j = 0; j < poles.size(); ++j) {
        const int m = poles[j].multiplicity;
        if (m < 1) throw DomainError("inverse_laplace_rational: multiplicity must be >= 1");
        const complex q = poles[j].location;

        std::vector<complex> series(static_cast<std::size_t>(m), complex{});
        series[0] = 1.0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (i == j) continue;
            const complex d = q - poles[i].location;
            if (d == complex{}) throw DomainError("inverse_laplace_rational: coincident poles");
            series = truncated_product(series, inverse_power_series(d, poles[i].multiplicity, m));
        }

        double factorial = 1.0;
        for (int k = 1; k <= m; ++k) {
            if (k > 1) factorial *= static_cast<double>(k - 1);
            const complex coeff = numerator * series[static_cast<std::size_t>(m - k)] / factorial;
            terms.push_back({coeff, -q, k - 1});
        }
    }
    return terms;
}

}  // namespace photonliq
