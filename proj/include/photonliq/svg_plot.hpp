#pragma once

#include <string>

#include "photonliq/correlation_curve.hpp"

namespace photonliq {

// Standalone SVG line plot of g2 against tau, with axis ranges in the corner
// labels.  Error bars are not drawn.
std::string render_svg_plot(const CorrelationCurve& curve, const std::string& title);

}  // namespace photonliq
