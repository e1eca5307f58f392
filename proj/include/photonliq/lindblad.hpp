#pragma once

#include <vector>

#include <Eigen/Dense>

#include "photonliq/correlation_curve.hpp"
#include "photonliq/phase_type.hpp"

namespace photonliq {

using DensityMatrix = Eigen::MatrixXcd;
using Superoperator = Eigen::MatrixXcd;

// Largest level count handled with a dense superoperator (256 x 256).
inline constexpr std::size_t kMaxCascadeLevels = 16;

// Incoherently pumped ladder |0> -> |n-1> -> |n-2> -> ... -> |0>.
//
// decays are in emission order: decays[0] drives |n-1> -> |n-2> and
// decays.back() drives |1> -> |0>.  The monitored transition is
// |monitored> -> |monitored - 1>, with sigma = |monitored - 1><monitored|.
struct CascadeModel {
    std::vector<double> energies;
    double pump = 1.0;
    std::vector<double> decays;
    std::size_t monitored = 1;

    // Pump from rates[0], decays from the remaining stages, zero energies.
    static CascadeModel from_rates(const StageRates& rates);

    std::size_t levels() const noexcept { return energies.size(); }

    // Throws DomainError for inconsistent sizes or non-positive rates and
    // CapacityError above kMaxCascadeLevels.
    void validate() const;
};

// Column-stacked generator: vec(L rho) = liouvillian * vec(rho), with
// L rho = -i[H, rho] + sum_k (rate_k / 2) (2 J rho J^+ - J^+ J rho - rho J^+ J).
Superoperator liouvillian(const CascadeModel& model);

// Unique trace-one fixed point of the generator.  Throws NumericError if the
// kernel is not one-dimensional.
DensityMatrix steady_state(const CascadeModel& model);

// sigma rho_ss sigma^+ propagated to every grid time with exp(L tau); the
// step propagator exp(L step) is built once and reused.
std::vector<DensityMatrix> propagate_conditional_state(const CascadeModel& model, const TauGrid& grid);

// g2(tau) = Tr(sigma^+ sigma e^{L tau}[sigma rho sigma^+]) / <sigma^+ sigma>^2.
CorrelationCurve g2_qrt(const CascadeModel& model, const TauGrid& grid);

}  // namespace photonliq
