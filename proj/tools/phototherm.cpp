// phototherm command-line front end.
//
// Verbs: sweep (analytic damping vs detuning), fit (coupling fit from a
// linewidth dataset), simulate (ring-down from the drift matrix), validate
// (analytic-vs-eigenvalue cross check), bath-kernel (memory kernel from a
// discrete bath). Numeric output is CSV with 17-significant-digit values and
// '\n' line endings so repeated runs are byte-identical.
//
// Exit codes: 0 success, 1 validation threshold exceeded, 2 usage/IO or any
// other module error, 3 degenerate fit, 4 ambiguous mode identification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phototherm/bath.hpp"
#include "phototherm/cooling.hpp"
#include "phototherm/dynamics.hpp"
#include "phototherm/fitdata.hpp"
#include "phototherm/io.hpp"
#include "phototherm/params.hpp"
#include "phototherm/parallel.hpp"
#include "phototherm/steadystate.hpp"
#include "phototherm/svg.hpp"

namespace {

using namespace phototherm;
using phototherm::detail::g17;

SystemParams load_config(const std::string& path) {
    ParsedConfig cfg = parse_config(read_text_file(path));
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cfg.params;
}

std::string sibling_svg_path(const std::string& out) {
    if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0)
        return out.substr(0, out.size() - 4) + ".svg";
    return out + ".svg";
}

std::vector<double> linspace(double from, double to, std::size_t points) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = from;
        return grid;
    }
    const double step = (to - from) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = from + step * static_cast<double>(i);
    return grid;
}

ReverseFeed parse_feed(const std::string& name) {
    if (name == "eta") return ReverseFeed::eta;
    if (name == "zero") return ReverseFeed::zero;
    throw config_error("unknown reverse-feed mode: " + name);
}

struct SweepArgs {
    std::string config, output, format = "csv";
    double from_hz = 0.0, to_hz = 0.0;
    std::size_t points = 21;
};

int do_sweep(const SweepArgs& a) {
    const SystemParams p = load_config(a.config);
    std::vector<double> grid_hz = linspace(a.from_hz, a.to_hz, a.points);
    std::vector<double> grid(grid_hz.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = two_pi * grid_hz[i];

    const std::vector<CoolingResult> results = sweep(p, grid);

    if (a.format == "csv" || a.format == "both") {
        std::string csv = "delta_c_hz,kappa_th_rad_s,kappa_rp_rad_s,kappa_eff_rad_s\n";
        for (const auto& r : results)
            csv += g17(r.delta_c / two_pi) + "," + g17(r.kappa_th) + "," + g17(r.kappa_rp) +
                   "," + g17(r.kappa_eff) + "\n";
        write_text_file(a.output, csv);
    }
    if (a.format == "svg" || a.format == "both") {
        PlotSeries s;
        s.label = "kappa_eff";
        s.x = grid_hz;
        for (const auto& r : results) s.y.push_back(r.kappa_eff);
        const std::string svg =
            render_svg_plot("effective damping vs detuning", "delta_c [Hz]",
                            "kappa_eff [rad/s]", {s});
        write_text_file(a.format == "svg" ? a.output : sibling_svg_path(a.output), svg);
    }
    return 0;
}

struct FitArgs {
    std::string config, data, output;
    bool include_rp = true;
};

int do_fit(const FitArgs& a) {
    const SystemParams base = load_config(a.config);
    const Dataset data = load_dataset(a.data);
    FitOptions opt;
    opt.include_rp = a.include_rp;
    const FitResult fit = fit_eta(data, base, opt);

    std::cout << "eta_over_gamma=" << g17(fit.eta_over_gamma) << '\n'
              << "stderr=" << g17(fit.std_error) << '\n'
              << "residual_rms_rad_s=" << g17(fit.residual_rms) << '\n'
              << "n_points=" << fit.n_points << '\n';

    if (!a.output.empty()) {
        PlotSeries measured, model;
        measured.label = "data";
        for (const auto& pt : data.points) {
            measured.x.push_back(pt.delta_c / two_pi);
            measured.y.push_back(pt.kappa_measured);
        }
        SystemParams fitted = apply_meta(base, data.meta);
        fitted.photothermal.eta_th_over_gamma = fit.eta_over_gamma;
        const double lo = *std::min_element(measured.x.begin(), measured.x.end());
        const double hi = *std::max_element(measured.x.begin(), measured.x.end());
        model.label = "fit";
        for (double hz : linspace(lo, hi, 201)) {
            const CoolingResult r = cooling_at(with_detuning(fitted, two_pi * hz));
            model.x.push_back(hz);
            model.y.push_back(a.include_rp ? r.kappa_eff : r.kappa_eff - r.kappa_rp);
        }
        write_text_file(a.output, render_svg_plot("linewidth fit", "delta_c [Hz]",
                                                  "kappa_eff [rad/s]", {measured, model}));
    }
    return 0;
}

struct SimulateArgs {
    std::string config, output, format = "csv", kernel = "exponential", feed = "eta";
    double tau = 0.0;  // 0 -> config tau_th
    double t_final = 0.0;
    std::size_t steps = 2000;
    double b0_re = 1.0, b0_im = 0.0;
};

int do_simulate(const SimulateArgs& a) {
    const SystemParams p = load_config(a.config);
    const double tau = a.tau > 0.0 ? a.tau : p.photothermal.tau_th;
    const KernelSpec kernel = a.kernel == "instantaneous" ? KernelSpec::instantaneous()
                                                          : KernelSpec::exponential(tau);
    const DriftMatrix drift = build_drift(p, kernel, parse_feed(a.feed));
    const RingdownTrace trace =
        simulate_ringdown(drift, cplx(a.b0_re, a.b0_im), a.t_final, a.steps);
    const DampingFit fit = fit_damping(trace);

    std::cout << "kappa_rad_s=" << g17(fit.kappa) << '\n'
              << "omega_rad_s=" << g17(fit.omega) << '\n'
              << "beating=" << (fit.beating ? 1 : 0) << '\n'
              << "expm_fallback=" << (trace.used_expm_fallback ? 1 : 0) << '\n';

    if (!a.output.empty()) {
        if (a.format == "csv" || a.format == "both") {
            std::string csv = "t_s,re_b,im_b,abs_b\n";
            for (std::size_t k = 0; k < trace.t.size(); ++k)
                csv += g17(trace.t[k]) + "," + g17(trace.b[k].real()) + "," +
                       g17(trace.b[k].imag()) + "," + g17(std::abs(trace.b[k])) + "\n";
            write_text_file(a.output, csv);
        }
        if (a.format == "svg" || a.format == "both") {
            PlotSeries s;
            s.label = "|b|";
            s.x = trace.t;
            for (const auto& b : trace.b) s.y.push_back(std::abs(b));
            const std::string svg =
                render_svg_plot("ring-down envelope", "t [s]", "|b|", {s});
            write_text_file(a.format == "svg" ? a.output : sibling_svg_path(a.output), svg);
        }
    }
    return 0;
}

struct ValidateArgs {
    std::string config, feed = "eta";
    std::size_t points = 21;
    double span = 3.0;  // grid half-width in units of kappa_c
    double threshold = 0.02;
};

int do_validate(const ValidateArgs& a) {
    const SystemParams p = load_config(a.config);
    const ReverseFeed feed = parse_feed(a.feed);
    const KernelSpec kernel = KernelSpec::exponential(p.photothermal.tau_th);
    const std::vector<double> grid =
        linspace(-a.span * p.cavity.kappa_c, a.span * p.cavity.kappa_c, a.points);

    std::vector<CoolingResult> analytic(grid.size());
    std::vector<EffectiveMode> oracle(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const SystemParams q = with_detuning(p, grid[i]);
        analytic[i] = cooling_at(q);
        oracle[i] = effective_mode(build_drift(q, kernel, feed));
    });

    double max_rel = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ana_shift = analytic[i].kappa_th + analytic[i].kappa_rp;
        const double orc_shift = oracle[i].kappa_eff - p.mech.kappa_m;
        // the deviation floor absorbs eigensolver noise (~1e-16 * matrix
        // norm) when both shifts are essentially zero
        const double rel = std::abs(ana_shift - orc_shift) /
                           std::max(std::abs(orc_shift), 1e-4 * p.mech.kappa_m);
        max_rel = std::max(max_rel, rel);
        std::cout << "delta_c_hz=" << g17(grid[i] / two_pi)
                  << " analytic_rad_s=" << g17(analytic[i].kappa_eff)
                  << " oracle_rad_s=" << g17(oracle[i].kappa_eff)
                  << " rel_dev=" << g17(rel) << '\n';
    }
    std::cout << "max_rel_deviation=" << g17(max_rel) << '\n';
    return max_rel <= a.threshold ? 0 : 1;
}

struct BathArgs {
    std::string bath, output;
    double t_max = 0.0;  // 0 -> 8x the slowest mode time
    std::size_t points = 512;
};

int do_bath_kernel(const BathArgs& a) {
    const BathSpec bath = load_bath_csv(a.bath);
    double kappa_min = bath.modes.front().kappa_mu;
    for (const auto& m : bath.modes) kappa_min = std::min(kappa_min, m.kappa_mu);
    const double t_max = a.t_max > 0.0 ? a.t_max : 8.0 / kappa_min;

    const KernelSamples samples = synthesize_kernel(bath, linspace(0.0, t_max, a.points));
    if (!samples.truncation_warning.empty())
        std::cerr << "warning: " << samples.truncation_warning << '\n';
    const ExponentialFit fit = fit_exponential(samples);

    std::cout << "tau_fit_s=" << g17(fit.tau_fit) << '\n'
              << "amplitude=" << g17(fit.amplitude) << '\n'
              << "residual=" << g17(fit.residual) << '\n';

    if (!a.output.empty()) {
        std::string csv = "t_s,re_m,im_m,abs_m\n";
        for (std::size_t k = 0; k < samples.t.size(); ++k)
            csv += g17(samples.t[k]) + "," + g17(samples.values[k].real()) + "," +
                   g17(samples.values[k].imag()) + "," + g17(std::abs(samples.values[k])) + "\n";
        write_text_file(a.output, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photothermal membrane cooling: sweeps, fits, and oracle checks"};
    app.require_subcommand(1);

    SweepArgs sweep_args;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "analytic damping rates vs detuning");
    cmd_sweep->add_option("--config", sweep_args.config, "parameter file")->required();
    cmd_sweep->add_option("--detuning-from", sweep_args.from_hz, "grid start [Hz]")->required();
    cmd_sweep->add_option("--detuning-to", sweep_args.to_hz, "grid end [Hz]")->required();
    cmd_sweep->add_option("--points", sweep_args.points, "grid size")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--output", sweep_args.output, "output path")->required();
    cmd_sweep->add_option("--format", sweep_args.format, "csv|svg|both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));

    FitArgs fit_args;
    CLI::App* cmd_fit = app.add_subcommand("fit", "fit the photothermal coupling to a dataset");
    cmd_fit->add_option("--config", fit_args.config, "parameter file")->required();
    cmd_fit->add_option("--data", fit_args.data, "dataset CSV")->required();
    cmd_fit->add_flag("--include-rp,!--no-include-rp", fit_args.include_rp,
                      "subtract the radiation-pressure channel (default on)");
    cmd_fit->add_option("--output", fit_args.output, "SVG overlay of data and fit");

    SimulateArgs sim_args;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "ring-down from the drift matrix");
    cmd_sim->add_option("--config", sim_args.config, "parameter file")->required();
    cmd_sim->add_option("--kernel", sim_args.kernel, "exponential|instantaneous")
        ->check(CLI::IsMember({"exponential", "instantaneous"}));
    cmd_sim->add_option("--tau", sim_args.tau, "kernel time [s]; defaults to config tau_th")
        ->check(CLI::PositiveNumber);
    cmd_sim->add_option("--t-final", sim_args.t_final, "trace length [s]")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_sim->add_option("--steps", sim_args.steps, "sample count")->check(CLI::PositiveNumber);
    cmd_sim->add_option("--b0-re", sim_args.b0_re, "initial b, real part");
    cmd_sim->add_option("--b0-im", sim_args.b0_im, "initial b, imaginary part");
    cmd_sim->add_option("--reverse-feed", sim_args.feed, "eta|zero")
        ->check(CLI::IsMember({"eta", "zero"}));
    cmd_sim->add_option("--output", sim_args.output, "trace output path");
    cmd_sim->add_option("--format", sim_args.format, "csv|svg|both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));

    ValidateArgs val_args;
    CLI::App* cmd_val = app.add_subcommand("validate", "analytic vs eigenvalue cross check");
    cmd_val->add_option("--config", val_args.config, "parameter file")->required();
    cmd_val->add_option("--points", val_args.points, "grid size")->check(CLI::PositiveNumber);
    cmd_val->add_option("--span", val_args.span, "half-width in kappa_c units")
        ->check(CLI::PositiveNumber);
    cmd_val->add_option("--threshold", val_args.threshold, "max allowed relative deviation")
        ->check(CLI::PositiveNumber);
    cmd_val->add_option("--reverse-feed", val_args.feed, "eta|zero")
        ->check(CLI::IsMember({"eta", "zero"}));

    BathArgs bath_args;
    CLI::App* cmd_bath = app.add_subcommand("bath-kernel", "memory kernel from a discrete bath");
    cmd_bath->add_option("--bath", bath_args.bath, "bath CSV")->required();
    cmd_bath->add_option("--t-max", bath_args.t_max, "grid end [s]; defaults to 8x slowest mode")
        ->check(CLI::PositiveNumber);
    cmd_bath->add_option("--points", bath_args.points, "sample count")
        ->check(CLI::Range(static_cast<std::size_t>(10), static_cast<std::size_t>(1000000)));
    cmd_bath->add_option("--output", bath_args.output, "kernel samples CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_sweep->parsed()) return do_sweep(sweep_args);
        if (cmd_fit->parsed()) return do_fit(fit_args);
        if (cmd_sim->parsed()) return do_simulate(sim_args);
        if (cmd_val->parsed()) return do_validate(val_args);
        if (cmd_bath->parsed()) return do_bath_kernel(bath_args);
    } catch (const ambiguous_mode_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const unidentifiable_fit_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;  // unreachable with require_subcommand(1)
}
