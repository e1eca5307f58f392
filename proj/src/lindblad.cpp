#include "photonliq/lindblad.hpp"

#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "photonliq/errors.hpp"

namespace photonliq {
namespace {

using Index = Eigen::Index;

Eigen::MatrixXcd ket_bra(std::size_t n, std::size_t row, std::size_t col) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(n));
    m(static_cast<Index>(row), static_cast<Index>(col)) = 1.0;
    return m;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, std::size_t n) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), static_cast<Index>(n), static_cast<Index>(n));
}

}  // namespace

CascadeModel CascadeModel::from_rates(const StageRates& rates) {
    const auto v = rates.values();
    if (v.size() < 2) throw DomainError("CascadeModel::from_rates: at least two stages (pump + one decay) are required");
    CascadeModel m;
    m.energies.assign(v.size(), 0.0);
    m.pump = v[0];
    m.decays.assign(v.begin() + 1, v.end());
    return m;
}

void CascadeModel::validate() const {
    const std::size_t n = levels();
    if (n < 2) throw DomainError(fmt::format("CascadeModel: {} levels, at least 2 required", n));
    if (n > kMaxCascadeLevels)
        throw CapacityError(fmt::format("CascadeModel: {} levels exceeds the dense limit of {}", n, kMaxCascadeLevels));
    if (decays.size() != n - 1)
        throw DomainError(fmt::format("CascadeModel: {} decay rates for {} levels (need {})", decays.size(), n, n - 1));
    if (!(pump > 0.0) || !std::isfinite(pump)) throw DomainError("CascadeModel: pump must be positive");
    for (std::size_t i = 0; i < decays.size(); ++i)
        if (!(decays[i] > 0.0) || !std::isfinite(decays[i]))
            throw DomainError(fmt::format("CascadeModel: decay[{}] = {} must be positive", i, decays[i]));
    for (double w : energies)
        if (!std::isfinite(w)) throw DomainError("CascadeModel: energies must be finite");
    if (monitored < 1 || monitored >= n)
        throw DomainError(fmt::format("CascadeModel: monitored level {} must lie in [1, {}]", monitored, n - 1));
}

Superoperator liouvillian(const CascadeModel& model) {
    model.validate();
    const std::size_t n = model.levels();
    const auto dim = static_cast<Index>(n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) h(static_cast<Index>(i), static_cast<Index>(i)) = model.energies[i];

    const std::complex<double> i_unit{0.0, 1.0};
    Superoperator l = -i_unit * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());

    auto add_jump = [&](double rate, const Eigen::MatrixXcd& jump) {
        const Eigen::MatrixXcd jj = jump.adjoint() * jump;
        l += rate * (Eigen::kroneckerProduct(jump.conjugate(), jump).eval() -
                     0.5 * Eigen::kroneckerProduct(id, jj).eval() - 0.5 * Eigen::kroneckerProduct(jj.transpose(), id).eval());
    };
    add_jump(model.pump, ket_bra(n, n - 1, 0));
    for (std::size_t k = 0; k < model.decays.size(); ++k) {
        const std::size_t upper = n - 1 - k;
        add_jump(model.decays[k], ket_bra(n, upper - 1, upper));
    }
    return l;
}

DensityMatrix steady_state(const CascadeModel& model) {
    const Superoperator l = liouvillian(model);
    const std::size_t n = model.levels();

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(l);
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() != 1)
        throw NumericError(fmt::format("steady_state: generator kernel has dimension {}, expected 1", lu.dimensionOfKernel()));

    // Row 0 (the |0><0| population equation) is dependent on the other
    // population rows; replace it with the trace condition.
    Superoperator system = l;
    system.row(0).setZero();
    for (std::size_t i = 0; i < n; ++i) system(0, static_cast<Index>(i * n + i)) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(l.rows());
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = system.fullPivLu().solve(rhs);

    DensityMatrix rho = unvectorize(x, n);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho / rho.trace().real();
}

std::vector<DensityMatrix> propagate_conditional_state(const CascadeModel& model, const TauGrid& grid) {
    if (grid.count > 0 && (!(grid.start >= 0.0) || (grid.count > 1 && !(grid.step > 0.0))))
        throw DomainError("propagate_conditional_state: grid must start at tau >= 0 with positive step");
    const Superoperator l = liouvillian(model);
    const std::size_t n = model.levels();
    const DensityMatrix rho = steady_state(model);
    const Eigen::MatrixXcd sigma = ket_bra(n, model.monitored - 1, model.monitored);

    Eigen::VectorXcd state = vectorize(sigma * rho * sigma.adjoint());
    if (grid.start > 0.0) state = (l * grid.start).exp() * state;
    const Superoperator step = grid.count > 1 ? (l * grid.step).exp().eval() : Superoperator::Identity(l.rows(), l.cols());

    std::vector<DensityMatrix> out;
    out.reserve(grid.count);
    for (std::size_t k = 0; k < grid.count; ++k) {
        if (k > 0) state = step * state;
        out.push_back(unvectorize(state, n));
    }
    return out;
}

CorrelationCurve g2_qrt(const CascadeModel& model, const TauGrid& grid) {
    const auto states = propagate_conditional_state(model, grid);
    const DensityMatrix rho = steady_state(model);
    const auto m = static_cast<Index>(model.monitored);
    const double occupation = rho(m, m).real();
    if (!(occupation > 0.0)) throw NumericError("g2_qrt: monitored level is unpopulated in the steady state");

    CorrelationCurve c;
    c.tau = grid.values();
    c.bin_width = grid.step;
    c.g2.reserve(states.size());
    // sigma^+ sigma = |m><m|, so the trace picks the (m, m) element.
    for (const auto& s : states) c.g2.push_back(s(m, m).real() / (occupation * occupation));
    return c;
}

}  // namespace photonliq
