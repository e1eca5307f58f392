#include "photonliq/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "photonliq/errors.hpp"
#include "photonliq/partial_fractions.hpp"

namespace photonliq {
namespace {

constexpr double kNewtonTolerance = 1e-13;
// Newton stalls at a noise floor near (nearly) repeated roots; a stalled
// iterate this close is accepted and left to the cluster detection.
constexpr double kNewtonFloor = kPoleClusterTolerance;
constexpr int kNewtonMaxIterations = 100;

// Monomial coefficients of prod(s + rate_i) - prod(rate_i), lowest order first.
std::vector<double> polynomial_coefficients(std::span<const double> rates) {
    std::vector<double> c{1.0};
    for (double r : rates) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += r * c[i];
            next[i + 1] += c[i];
        }
        c = std::move(next);
    }
    c[0] = 0.0;
    return c;
}

[[noreturn]] void throw_nonconvergence(std::span<const double> rates, complex root) {
    throw NumericError(fmt::format("find_poles: Newton polishing did not converge near {}{:+}i; polynomial coefficients "
                                   "(ascending) [{}]",
                                   root.real(), root.imag(), fmt::join(polynomial_coefficients(rates), ", ")));
}

// Newton on Q(s) = (prod(s + r_i) - prod r_i) / s.  With R = prod((s + r_i) / r_i)
// and S = sum 1/(s + r_i):  Q'/Q = R S / (R - 1) - 1/s.
complex polish(std::span<const double> rates, complex s) {
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
        complex ratio{1.0, 0.0};
        complex inv_sum{};
        for (double r : rates) {
            ratio *= (s + r) / r;
            inv_sum += 1.0 / (s + r);
        }
        const complex log_derivative = ratio * inv_sum / (ratio - 1.0) - 1.0 / s;
        if (!std::isfinite(std::abs(log_derivative))) return s;  // landed exactly on the root
        const complex step = 1.0 / log_derivative;
        s -= step;
        const double rel = std::abs(step) / std::abs(s);
        if (rel <= kNewtonTolerance) return s;
        if (rel >= last_step && rel <= kNewtonFloor) return s;
        last_step = rel;
    }
    throw_nonconvergence(rates, s);
}

struct Cluster {
    complex location;
    std::vector<std::size_t> members;
};

}  // namespace

int PoleSet::order() const noexcept {
    return std::accumulate(poles.begin(), poles.end(), 0, [](int acc, const RenewalPole& p) { return acc + p.multiplicity(); });
}

complex PoleSet::residue_sum() const {
    complex sum{};
    for (const auto& p : poles) sum += p.coefficients.front();
    return sum;
}

complex g2_laplace(const StageRates& rates, complex s) {
    const complex w = laplace(rates, s);
    const complex denom = 1.0 - w;
    if (std::abs(denom) <= 8.0 * std::numeric_limits<double>::epsilon())
        throw PoleError(fmt::format("g2_laplace: 1 - w(s) vanishes at s = {}{:+}i", s.real(), s.imag()));
    return w / (mean_rate(rates) * denom);
}

PoleSet find_poles(const StageRates& input) {
    const auto sorted = input.sorted();
    const auto rates = sorted.values();
    const std::size_t n = rates.size();
    PoleSet result;
    if (n < 2) return result;

    // Cyclic generator: stage i -> i+1 at rate_i, last stage back to 0.
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        generator(ii, ii) = -rates[i];
        generator(ii, static_cast<Eigen::Index>((i + 1) % n)) = rates[i];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(generator, false);
    if (solver.info() != Eigen::Success) throw_nonconvergence(rates, complex{});
    std::vector<complex> eig(solver.eigenvalues().begin(), solver.eigenvalues().end());

    // The eigenvalue nearest zero is the stationary one; drop it.
    const auto zero_it = std::min_element(eig.begin(), eig.end(), [](complex a, complex b) { return std::abs(a) < std::abs(b); });
    eig.erase(zero_it);

    // Polish the upper half plane (and the real axis); conjugates are exact copies.
    std::vector<complex> roots;
    for (complex e : eig) {
        if (e.imag() < 0.0) continue;
        const complex p = polish(rates, e);
        if (e.imag() == 0.0) {
            roots.emplace_back(p.real(), 0.0);
        } else {
            roots.push_back(p);
            roots.push_back(std::conj(p));
        }
    }
    if (roots.size() != n - 1) throw_nonconvergence(rates, complex{});
    std::sort(roots.begin(), roots.end(), [](complex a, complex b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });

    // Group near-coincident roots.
    std::vector<Cluster> clusters;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        auto hit = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
            return std::abs(c.location - roots[i]) <= kPoleClusterTolerance * std::max(std::abs(c.location), std::abs(roots[i]));
        });
        if (hit == clusters.end()) {
            clusters.push_back({roots[i], {i}});
        } else {
            hit->members.push_back(i);
            complex mean{};
            for (auto m : hit->members) mean += roots[m];
            hit->location = mean / static_cast<double>(hit->members.size());
        }
    }

    const double rate = mean_rate(sorted);
    const bool all_simple = std::all_of(clusters.begin(), clusters.end(), [](const Cluster& c) { return c.members.size() == 1; });
    if (all_simple) {
        // Residue of (1/r) prod(rate) / P(s) at a simple root p, using
        // prod(p + rate_i) = prod(rate_i):  1 / (r sum_i 1/(p + rate_i)).
        for (const auto& c : clusters) {
            complex inv_sum{};
            for (double r : rates) inv_sum += 1.0 / (c.location + r);
            result.poles.push_back({c.location, {1.0 / (rate * inv_sum)}});
        }
        return result;
    }

    // Confluent case: g2~(s) = C / (s prod_k (s - p_k)^{m_k}) with C = prod(rate) / r.
    std::vector<PoleCluster> pf{{complex{}, 1}};
    for (const auto& c : clusters) {
        complex loc = c.location;
        if (std::abs(loc.imag()) <= kPoleClusterTolerance * std::abs(loc)) loc.imag(0.0);
        pf.push_back({loc, static_cast<int>(c.members.size())});
    }
    double numerator = 1.0 / rate;
    for (double r : rates) numerator *= r;
    const auto terms = inverse_laplace_rational(numerator, pf);
    for (std::size_t k = 1; k < pf.size(); ++k) {
        RenewalPole pole{pf[k].location, std::vector<complex>(static_cast<std::size_t>(pf[k].multiplicity))};
        for (const auto& t : terms)
            if (t.decay == -pf[k].location) pole.coefficients[static_cast<std::size_t>(t.power)] = t.amplitude;
        result.poles.push_back(std::move(pole));
    }
    return result;
}

ExponentialMixture renewal_mixture(const StageRates& rates) {
    ExponentialMixture m;
    for (const auto& pole : find_poles(rates).poles)
        for (std::size_t k = 0; k < pole.coefficients.size(); ++k)
            m.terms.push_back({pole.coefficients[k], -pole.location, static_cast<int>(k)});
    return m;
}

CorrelationCurve g2_from_renewal(const StageRates& rates, const TauGrid& grid) {
    if (grid.count > 0 && (!(grid.start >= 0.0) || !(grid.step > 0.0)))
        throw DomainError("g2_from_renewal: grid must start at tau >= 0 with positive step");
    return sample_curve(renewal_mixture(rates), grid);
}

}  // namespace photonliq
