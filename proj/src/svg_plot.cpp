#include "photonliq/svg_plot.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace photonliq {

std::string render_svg_plot(const CorrelationCurve& curve, const std::string& title) {
    constexpr double width = 640.0, height = 400.0, margin = 50.0;
    if (curve.size() == 0) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";

    const auto [tmin_it, tmax_it] = std::minmax_element(curve.tau.begin(), curve.tau.end());
    const auto [gmin_it, gmax_it] = std::minmax_element(curve.g2.begin(), curve.g2.end());
    const double t0 = *tmin_it, t1 = std::max(*tmax_it, t0 + 1e-300);
    const double g0 = std::min(0.0, *gmin_it), g1 = std::max(*gmax_it, g0 + 1e-12);

    auto x = [&](double t) { return margin + (t - t0) / (t1 - t0) * (width - 2 * margin); };
    auto y = [&](double g) { return height - margin - (g - g0) / (g1 - g0) * (height - 2 * margin); };

    std::string points;
    for (std::size_t i = 0; i < curve.size(); ++i) points += fmt::format("{:.2f},{:.2f} ", x(curve.tau[i]), y(curve.g2[i]));

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect x=\"{2}\" y=\"{2}\" width=\"{3}\" height=\"{4}\" fill=\"none\" stroke=\"black\"/>\n",
        width, height, margin, width - 2 * margin, height - 2 * margin);
    if (g0 <= 1.0 && g1 >= 1.0)
        svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n", margin,
                           y(1.0), width - margin, y(1.0));
    svg += fmt::format("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n", points);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"14\">{}</text>\n", margin, margin - 15, title);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">tau: [{:.4g}, {:.4g}]</text>\n", margin, height - 15, t0, t1);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">g2: [{:.4g}, {:.4g}]</text>\n",
                       width - margin, height - 15, g0, g1);
    svg += "</svg>\n";
    return svg;
}

}  // namespace photonliq
