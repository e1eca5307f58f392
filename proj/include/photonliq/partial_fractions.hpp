#pragma once

#include <span>
#include <vector>

#include "photonliq/exponential_mixture.hpp"

namespace photonliq {

struct PoleCluster {
    complex location;
    int multiplicity = 1;
};

// Inverse Laplace transform of  numerator / prod_j (s - q_j)^{m_j}.
//
// Each pole q of multiplicity m contributes m terms c_k tau^{k-1} e^{q tau},
// k = 1..m.  The coefficients come from the Taylor expansion of the remaining
// factors around q, so equal poles are handled exactly rather than through
// 1/(q_i - q_j) differences.  Pole locations must be pairwise distinct.
std::vector<MixtureTerm> inverse_laplace_rational(complex numerator, std::span<const PoleCluster> poles);

}  // namespace photonliq
