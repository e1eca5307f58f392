#include "photonliq/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "photonliq/analytic_g2.hpp"
#include "photonliq/errors.hpp"
#include "photonliq/lindblad.hpp"
#include "photonliq/renewal.hpp"
#include "photonliq/stream.hpp"
#include "photonliq/stream_io.hpp"
#include "photonliq/svg_plot.hpp"
#include "photonliq/version.hpp"

namespace photonliq::cli {
namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

using Clock = std::chrono::steady_clock;

// Drive of the Mollow panel, in units of gamma.
constexpr double kFigureMollowDrive = 2.0;

struct OutputOptions {
    std::string format = "csv";
    std::string out;
    bool plot = false;
    bool symmetric = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& o, bool symmetric = true) {
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
    cmd->add_flag("--plot", o.plot, "Also write an SVG line plot next to the output");
    if (symmetric) cmd->add_flag("--symmetric", o.symmetric, "Mirror the curve to negative delays");
}

struct AnalyticOptions {
    std::string model;
    int n = 2;
    double gamma = 1.0;
    std::optional<double> pump;
    std::optional<double> omega;
    std::optional<double> tau_max;
    std::optional<double> bin;
    OutputOptions output;
};

struct SimulateOptions {
    std::vector<double> rates;
    std::optional<int> n;
    double gamma = 1.0;
    std::optional<double> duration;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
};

struct EstimateOptions {
    std::string in;
    std::optional<double> bin;
    std::optional<double> tau_max;
    double jitter = 0.0;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::optional<double> duration;
    OutputOptions output;
};

struct CompareOptions {
    std::string route_a;
    std::string route_b;
    int n = 3;
    double gamma = 1.0;
    std::vector<double> rates;
    std::optional<double> pump;
    std::optional<double> omega;
    std::optional<double> tau_max;
    std::optional<double> bin;
    double tol = 1e-8;
    std::string out;
    std::string format = "csv";
};

struct FigureOptions {
    std::string out = "figure2";
    double gamma = 1.0;
    std::size_t points = 1001;
    std::string format = "csv";
    bool plot = false;
};

ordered_json base_manifest(const std::string& command) {
    ordered_json m;
    m["version"] = kVersion;
    m["command"] = command;
    return m;
}

void finish_manifest(ordered_json& m, Clock::time_point start, const fs::path& path) {
    m["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
    write_text_file(path, m.dump(2) + "\n");
}

fs::path manifest_path_for(const fs::path& data) { return fs::path(data.string() + ".manifest.json"); }

std::string render_curve(const CorrelationCurve& curve, const std::string& format) {
    if (format == "json") {
        ordered_json j;
        j["version"] = kVersion;
        j["metadata"] = curve_metadata_json(curve);
        j["data"] = curve_to_json(curve);
        return j.dump(2) + "\n";
    }
    return curve_to_csv(curve);
}

// Writes the curve (and optional plot) and returns the list of files written.
std::vector<std::string> emit_curve(const CorrelationCurve& raw, const OutputOptions& o, const std::string& title,
                                    std::ostream& out) {
    const CorrelationCurve curve = o.symmetric ? raw.mirrored() : raw;
    const std::string body = render_curve(curve, o.format);
    if (o.out.empty()) {
        out << body;
        return {};
    }
    std::vector<std::string> files{o.out};
    write_text_file(o.out, body);
    if (o.plot) {
        const std::string svg = o.out + ".svg";
        write_text_file(svg, render_svg_plot(curve, title));
        files.push_back(svg);
    }
    return files;
}

TauGrid make_grid(double tau_max, double bin) {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw UsageError(fmt::format("--tau-max {} must be positive", tau_max));
    if (!(bin > 0.0) || bin > tau_max) throw UsageError(fmt::format("--bin {} must lie in (0, tau-max]", bin));
    const auto steps = static_cast<std::size_t>(std::llround(tau_max / bin));
    return TauGrid{0.0, bin, steps + 1};
}

StageRates stage_rates(const std::vector<double>& rates, std::optional<int> n, double gamma) {
    if (!rates.empty()) return StageRates(rates);
    if (!n) throw UsageError("give either --rates or --n");
    if (*n < 1) throw UsageError(fmt::format("--n {} must be >= 1", *n));
    return StageRates::erlang(static_cast<std::size_t>(*n), gamma);
}

// ---------------------------------------------------------------- analytic

ExponentialMixture analytic_mixture(const AnalyticOptions& a) {
    if (a.model == "incoherent") return incoherent_2ls_mixture(a.pump.value_or(a.gamma), a.gamma);
    if (a.model == "heitler") return heitler_mixture(a.gamma);
    if (a.model == "mollow") {
        if (!a.omega) throw UsageError("analytic mollow needs --omega");
        return mollow_mixture({a.gamma, *a.omega});
    }
    if (a.model == "cascade") return erlang_cascade_mixture(a.n, a.gamma);
    throw UsageError(fmt::format("unknown model '{}'", a.model));
}

double analytic_mean_rate(const AnalyticOptions& a) {
    if (a.model == "cascade" || a.model == "cascade-closed") return a.gamma / std::max(1, a.n);
    if (a.model == "incoherent") {
        const double p = a.pump.value_or(a.gamma);
        return p * a.gamma / (p + a.gamma);
    }
    return a.gamma;
}

int cmd_analytic(const AnalyticOptions& a, std::ostream& out) {
    const auto start = Clock::now();
    if (!(a.gamma > 0.0)) throw UsageError("--gamma must be positive");
    const double tau_max = a.tau_max.value_or(10.0 / analytic_mean_rate(a));
    const double bin = a.bin.value_or(tau_max / 1000.0);
    const TauGrid grid = make_grid(tau_max, bin);

    CorrelationCurve curve;
    if (a.model == "cascade-closed") {
        curve.tau = grid.values();
        curve.bin_width = grid.step;
        for (double t : curve.tau) curve.g2.push_back(g2_cascade_closed_form(a.n, a.gamma, t));
    } else {
        curve = sample_curve(analytic_mixture(a), grid);
    }

    const auto files = emit_curve(curve, a.output, "analytic " + a.model, out);
    if (files.empty()) return kSuccess;

    ordered_json m = base_manifest("analytic");
    ordered_json p;
    p["model"] = a.model;
    p["n"] = a.n;
    p["gamma"] = a.gamma;
    p["pump"] = a.pump.value_or(a.gamma);
    if (a.omega) p["omega"] = *a.omega;
    p["tau_max"] = tau_max;
    p["bin"] = bin;
    p["symmetric"] = a.output.symmetric;
    p["format"] = a.output.format;
    m["parameters"] = p;
    m["seeds"] = ordered_json::array();
    m["generator"] = nullptr;
    m["outputs"] = files;
    m["curve"] = curve_metadata_json(curve);
    finish_manifest(m, start, manifest_path_for(a.output.out));
    return kSuccess;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const SimulateOptions& s, std::ostream& out) {
    const auto start = Clock::now();
    const StageRates rates = stage_rates(s.rates, s.n, s.gamma);
    const double duration = s.duration.value_or(1e6 / mean_rate(rates));
    if (!(duration > 0.0)) throw UsageError(fmt::format("--duration {} must be positive", duration));
    stream_format_for(s.out);

    const PhotonStream stream = simulate_stream(rates, duration, s.seed);
    write_stream(stream, s.out);

    ordered_json summary;
    summary["events"] = stream.size();
    summary["duration"] = duration;
    summary["rate_estimate"] = stream.rate_estimate();
    summary["mean_rate"] = mean_rate(rates);
    if (s.format == "json") {
        out << summary.dump(2) << "\n";
    } else {
        out << "events,duration,rate_estimate,mean_rate\n"
            << stream.size() << ',' << format_double(duration) << ',' << format_double(stream.rate_estimate()) << ','
            << format_double(mean_rate(rates)) << "\n";
    }

    ordered_json m = base_manifest("simulate");
    ordered_json p;
    p["rates"] = std::vector<double>(rates.values().begin(), rates.values().end());
    p["duration"] = duration;
    p["seed"] = s.seed;
    m["parameters"] = p;
    m["seeds"] = {s.seed};
    m["generator"] = kGeneratorIdentity;
    m["outputs"] = {s.out, sidecar_path(s.out).string()};
    m["summary"] = summary;
    finish_manifest(m, start, manifest_path_for(s.out));
    return kSuccess;
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const EstimateOptions& e, std::ostream& out) {
    const auto start = Clock::now();
    PhotonStream stream = read_stream(e.in, e.duration);
    if (stream.empty()) throw ValidationError(fmt::format("'{}' holds no timestamps", e.in));
    if (e.jitter < 0.0) throw UsageError("--jitter must be >= 0");
    if (e.jitter > 0.0) stream = apply_jitter(stream, e.jitter, e.seed);

    const auto defaults = default_binning(stream.rate_estimate());
    const double bin = e.bin.value_or(defaults.bin_width);
    const double tau_max = e.tau_max.value_or(std::min(defaults.tau_max, 0.5 * stream.duration()));
    const CorrelationCurve curve = estimate_g2(stream, bin, tau_max, e.threads);

    const auto files = emit_curve(curve, e.output, "estimate " + fs::path(e.in).filename().string(), out);
    if (files.empty()) return kSuccess;

    ordered_json m = base_manifest("estimate");
    ordered_json p;
    p["in"] = e.in;
    p["bin"] = bin;
    p["tau_max"] = tau_max;
    p["jitter"] = e.jitter;
    p["jitter_seed"] = e.seed;
    p["symmetric"] = e.output.symmetric;
    p["format"] = e.output.format;
    m["parameters"] = p;
    m["seeds"] = {stream.metadata().seed, e.seed};
    m["generator"] = kGeneratorIdentity;
    m["outputs"] = files;
    m["input"] = stream_metadata_json(stream);
    m["curve"] = curve_metadata_json(curve);
    finish_manifest(m, start, manifest_path_for(e.output.out));
    return kSuccess;
}

// ---------------------------------------------------------------- compare

const std::vector<std::string> kRoutes{"cascade", "cascade-closed", "renewal", "lindblad", "incoherent", "heitler", "mollow"};

std::vector<double> route_curve(const std::string& route, const CompareOptions& c, const TauGrid& grid) {
    const bool custom_rates = !c.rates.empty();
    const StageRates rates = custom_rates ? StageRates(c.rates) : StageRates::erlang(static_cast<std::size_t>(std::max(1, c.n)), c.gamma);
    auto equal_rates_only = [&] {
        if (custom_rates && !rates.all_equal())
            throw UsageError(fmt::format("route '{}' needs equal rates; use renewal or lindblad for --rates", route));
    };
    const std::vector<double> taus = grid.values();
    if (route == "cascade") {
        equal_rates_only();
        return erlang_cascade_mixture(static_cast<int>(rates.size()), rates[0]).evaluate(taus);
    }
    if (route == "cascade-closed") {
        equal_rates_only();
        std::vector<double> v;
        for (double t : taus) v.push_back(g2_cascade_closed_form(static_cast<int>(rates.size()), rates[0], t));
        return v;
    }
    if (route == "renewal") return g2_from_renewal(rates, grid).g2;
    if (route == "lindblad") {
        if (rates.size() > kMaxCascadeLevels)
            throw UsageError(fmt::format("route lindblad supports at most {} levels, got {}", kMaxCascadeLevels, rates.size()));
        return g2_qrt(CascadeModel::from_rates(rates), grid).g2;
    }
    if (route == "incoherent") return incoherent_2ls_mixture(c.pump.value_or(c.gamma), c.gamma).evaluate(taus);
    if (route == "heitler") return heitler_mixture(c.gamma).evaluate(taus);
    if (route == "mollow") {
        if (!c.omega) throw UsageError("route mollow needs --omega");
        return mollow_mixture({c.gamma, *c.omega}).evaluate(taus);
    }
    throw UsageError(fmt::format("unknown route '{}'", route));
}

int cmd_compare(const CompareOptions& c, std::ostream& out) {
    const auto start = Clock::now();
    if (!(c.gamma > 0.0)) throw UsageError("--gamma must be positive");
    if (!(c.tol >= 0.0)) throw UsageError("--tol must be >= 0");
    const double rate = c.rates.empty() ? c.gamma / std::max(1, c.n) : mean_rate(StageRates(c.rates));
    const double tau_max = c.tau_max.value_or(10.0 / rate);
    const double bin = c.bin.value_or(tau_max / 1000.0);
    const TauGrid grid = make_grid(tau_max, bin);

    const auto a = route_curve(c.route_a, c, grid);
    const auto b = route_curve(c.route_b, c, grid);
    double max_diff = 0.0;
    double at = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (!(d <= max_diff)) {
            max_diff = d;
            at = grid[i];
        }
    }
    const bool pass = max_diff <= c.tol;

    ordered_json report;
    report["route_a"] = c.route_a;
    report["route_b"] = c.route_b;
    report["points"] = grid.count;
    report["max_abs_diff"] = max_diff;
    report["at_tau"] = at;
    report["tolerance"] = c.tol;
    report["pass"] = pass;
    if (c.format == "json") {
        out << report.dump(2) << "\n";
    } else {
        out << "route_a,route_b,points,max_abs_diff,at_tau,tolerance,pass\n"
            << c.route_a << ',' << c.route_b << ',' << grid.count << ',' << format_double(max_diff) << ','
            << format_double(at) << ',' << format_double(c.tol) << ',' << (pass ? "true" : "false") << "\n";
    }

    if (!c.out.empty()) {
        std::string body;
        if (c.format == "json") {
            ordered_json j;
            j["tau"] = grid.values();
            j[c.route_a] = a;
            j[c.route_b] = b;
            std::vector<double> diff(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
            j["diff"] = diff;
            body = j.dump(2) + "\n";
        } else {
            body = "tau,a,b,diff\n";
            for (std::size_t i = 0; i < a.size(); ++i)
                body += fmt::format("{},{},{},{}\n", format_double(grid[i]), format_double(a[i]), format_double(b[i]),
                                    format_double(a[i] - b[i]));
        }
        write_text_file(c.out, body);
        ordered_json m = base_manifest("compare");
        ordered_json p;
        p["route_a"] = c.route_a;
        p["route_b"] = c.route_b;
        p["n"] = c.n;
        p["gamma"] = c.gamma;
        p["rates"] = c.rates;
        if (c.pump) p["pump"] = *c.pump;
        if (c.omega) p["omega"] = *c.omega;
        p["tau_max"] = tau_max;
        p["bin"] = bin;
        p["tol"] = c.tol;
        m["parameters"] = p;
        m["seeds"] = ordered_json::array();
        m["generator"] = nullptr;
        m["outputs"] = {c.out};
        m["report"] = report;
        finish_manifest(m, start, manifest_path_for(c.out));
    }
    return pass ? kSuccess : kToleranceFailure;
}

// ---------------------------------------------------------------- figure2

int cmd_figure2(const FigureOptions& f, std::ostream& out) {
    const auto start = Clock::now();
    if (!(f.gamma > 0.0)) throw UsageError("--gamma must be positive");
    if (f.points < 2) throw UsageError("--points must be >= 2");
    std::error_code ec;
    fs::create_directories(f.out, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", f.out, ec.message()));

    const double g = f.gamma;
    constexpr int kLiquidSteps = 26;
    const double wide_tau_max = 4.0 * kLiquidSteps / g;
    struct Panel {
        std::string id;
        std::string label;
        ExponentialMixture mixture;
        double tau_max;
    };
    const std::vector<Panel> panels{
        {"i", "coherent light (N = 1)", erlang_cascade_mixture(1, g), 10.0 / g},
        {"ii", "incoherent 2LS, P = gamma", incoherent_2ls_mixture(g, g), 10.0 / g},
        {"iii", "Mollow, Omega = 2 gamma", mollow_mixture({g, kFigureMollowDrive * g}), 10.0 / g},
        {"iv", "one cascade (N = 3)", erlang_cascade_mixture(3, g), 10.0 / g},
        {"v", "five cascades (N = 6)", erlang_cascade_mixture(6, g), 10.0 / g},
        {"vi", "25 cascades (N = 26), wide axis", erlang_cascade_mixture(kLiquidSteps, g), wide_tau_max},
    };

    std::vector<std::string> files;
    ordered_json curves = ordered_json::array();
    for (const auto& panel : panels) {
        const TauGrid grid = TauGrid::span(0.0, panel.tau_max, f.points);
        const CorrelationCurve curve = sample_curve(panel.mixture, grid);
        OutputOptions o;
        o.format = f.format;
        o.plot = f.plot;
        o.symmetric = true;
        o.out = (fs::path(f.out) / fmt::format("fig2_{}.{}", panel.id, f.format)).string();
        auto written = emit_curve(curve, o, fmt::format("({}) {}", panel.id, panel.label), out);
        files.insert(files.end(), written.begin(), written.end());

        double peak = curve.g2.front();
        for (double v : curve.g2) peak = std::max(peak, v);
        ordered_json c;
        c["id"] = panel.id;
        c["label"] = panel.label;
        c["tau_max"] = panel.tau_max;
        c["max_g2"] = peak;
        curves.push_back(c);
    }

    ordered_json m = base_manifest("figure2");
    ordered_json p;
    p["gamma"] = g;
    p["points_per_side"] = f.points;
    p["mollow_omega"] = kFigureMollowDrive * g;
    p["liquid_steps"] = kLiquidSteps;
    p["format"] = f.format;
    m["parameters"] = p;
    m["seeds"] = ordered_json::array();
    m["generator"] = nullptr;
    m["outputs"] = files;
    m["curves"] = curves;
    finish_manifest(m, start, fs::path(f.out) / "manifest.json");
    out << fmt::format("wrote {} files to {}\n", files.size(), f.out);
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"photonliq: second-order coherence of cascaded photon emitters"};
    app.name("photonliq");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    AnalyticOptions a;
    auto* analytic = app.add_subcommand("analytic", "Closed-form g2 curves");
    analytic->add_option("model", a.model, "incoherent | heitler | mollow | cascade | cascade-closed")
        ->required()
        ->check(CLI::IsMember({"incoherent", "heitler", "mollow", "cascade", "cascade-closed"}));
    analytic->add_option("--n", a.n, "Number of stages (excitation + cascades)");
    analytic->add_option("--gamma", a.gamma, "Decay rate");
    analytic->add_option("--pump", a.pump, "Incoherent pump rate (default: gamma)");
    analytic->add_option("--omega", a.omega, "Coherent drive amplitude (mollow)");
    analytic->add_option("--tau-max", a.tau_max, "Largest delay (default 10 / mean rate)");
    analytic->add_option("--bin", a.bin, "Grid step (default tau-max / 1000)");
    add_output_options(analytic, a.output);

    SimulateOptions s;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo photon stream");
    simulate->add_option("--rates", s.rates, "Stage rates, pump first")->delimiter(',');
    simulate->add_option("--n", s.n, "Number of equal stages (with --gamma)");
    simulate->add_option("--gamma", s.gamma, "Rate of every stage when --n is used");
    simulate->add_option("--duration", s.duration, "Observation window (default 1e6 / mean rate)");
    simulate->add_option("--seed", s.seed, "Random seed");
    simulate->add_option("--out", s.out, "Timestamp file (.txt or .f64)")->required();
    simulate->add_option("--format", s.format, "Summary format")->check(CLI::IsMember({"csv", "json"}));

    EstimateOptions e;
    auto* estimate = app.add_subcommand("estimate", "Histogram estimate of g2 from a timestamp file");
    estimate->add_option("--in", e.in, "Timestamp file (.txt or .f64)")->required();
    estimate->add_option("--bin", e.bin, "Bin width (default 0.01 / rate)");
    estimate->add_option("--tau-max", e.tau_max, "Largest delay (default 30 / rate)");
    estimate->add_option("--jitter", e.jitter, "Gaussian timestamp noise, standard deviation");
    estimate->add_option("--seed", e.seed, "Seed for --jitter");
    estimate->add_option("--threads", e.threads, "Worker threads (0 = all cores)");
    estimate->add_option("--duration", e.duration, "Observation window when no sidecar metadata exists");
    add_output_options(estimate, e.output);

    CompareOptions c;
    auto* compare = app.add_subcommand("compare", "Compare two g2 routes on a shared grid");
    compare->add_option("--a", c.route_a, "First route")->required()->check(CLI::IsMember(kRoutes));
    compare->add_option("--b", c.route_b, "Second route")->required()->check(CLI::IsMember(kRoutes));
    compare->add_option("--n", c.n, "Number of equal stages");
    compare->add_option("--gamma", c.gamma, "Stage / decay rate");
    compare->add_option("--rates", c.rates, "Explicit stage rates (renewal, lindblad)")->delimiter(',');
    compare->add_option("--pump", c.pump, "Pump rate (incoherent)");
    compare->add_option("--omega", c.omega, "Drive amplitude (mollow)");
    compare->add_option("--tau-max", c.tau_max, "Largest delay (default 10 / mean rate)");
    compare->add_option("--bin", c.bin, "Grid step (default tau-max / 1000)");
    compare->add_option("--tol", c.tol, "Pass threshold on max |a - b|");
    compare->add_option("--out", c.out, "Write both curves and their difference");
    compare->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    FigureOptions f;
    auto* figure2 = app.add_subcommand("figure2", "The six reference curves, coherent light to photon liquid");
    figure2->add_option("--out", f.out, "Output directory");
    figure2->add_option("--gamma", f.gamma, "Rate shared by every stage");
    figure2->add_option("--points", f.points, "Grid points per side");
    figure2->add_option("--format", f.format, "Curve format")->check(CLI::IsMember({"csv", "json"}));
    figure2->add_flag("--plot", f.plot, "Write an SVG per curve");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (analytic->parsed()) return cmd_analytic(a, out);
        if (simulate->parsed()) return cmd_simulate(s, out);
        if (estimate->parsed()) return cmd_estimate(e, out);
        if (compare->parsed()) return cmd_compare(c, out);
        if (figure2->parsed()) return cmd_figure2(f, out);
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return kUsage;
    } catch (const DomainError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return kUsage;
    } catch (const CapacityError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return kUsage;
    } catch (const ValidationError& ex) {
        err << "validation error: " << ex.what() << "\n";
        return kValidation;
    } catch (const IoError& ex) {
        err << "i/o error: " << ex.what() << "\n";
        return kIo;
    } catch (const Error& ex) {
        err << "numeric error: " << ex.what() << "\n";
        return kNumeric;
    } catch (const std::exception& ex) {
        err << "numeric error: " << ex.what() << "\n";
        return kNumeric;
    }
    return kUsage;
}

}  // namespace photonliq::cli
