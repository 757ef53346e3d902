#pragma once

// Discrete phonon bath -> effective memory kernel. A bath of damped modes
// (kappa_mu, omega_mu, weight_mu) synthesizes M(t) = sum_mu w_mu
// e^{-kappa_mu t} e^{-i omega_mu t}; normalized to unit integral this is the
// kernel consumed by the dynamics module, and a single-exponential fit to its
// envelope recovers the effective thermal response time.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "phototherm/constants.hpp"
#include "phototherm/dynamics.hpp"
#include "phototherm/errors.hpp"
#include "phototherm/io.hpp"

namespace phototherm {

struct BathMode {
    double kappa_mu = 0.0;  // amplitude decay rate, rad/s, > 0
    double omega_mu = 0.0;  // oscillation frequency, rad/s
    cplx weight = 1.0;
};

struct BathSpec {
    std::vector<BathMode> modes;
};

inline void check_bath(const BathSpec& bath) {
    if (bath.modes.empty()) throw kernel_error("bath: mode list is empty");
    for (std::size_t i = 0; i < bath.modes.size(); ++i)
        if (!(bath.modes[i].kappa_mu > 0.0))
            throw kernel_error("bath: mode " + std::to_string(i) + " has kappa_mu <= 0");
}

struct KernelSamples {
    std::vector<double> t;
    std::vector<cplx> values;
    std::string truncation_warning;  // empty when the grid covers the slow modes
};

// Sample the bath kernel on a uniform grid from t = 0 and normalize so the
// trapezoidal integral over the grid is exactly 1 (the continuous kernels
// used elsewhere all have unit integral).
inline KernelSamples synthesize_kernel(const BathSpec& bath, const std::vector<double>& t_grid) {
    check_bath(bath);
    if (t_grid.size() < 2) throw kernel_error("synthesize_kernel: need >= 2 grid points");
    if (t_grid.front() != 0.0) throw kernel_error("synthesize_kernel: grid must start at t = 0");
    const double dt = t_grid[1] - t_grid[0];
    if (!(dt > 0.0)) throw kernel_error("synthesize_kernel: grid must be increasing");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (std::abs(t_grid[k] - t_grid[k - 1] - dt) > 1e-9 * dt)
            throw kernel_error("synthesize_kernel: grid must be uniform (step " +
                               std::to_string(k) + " deviates)");

    KernelSamples out;
    out.t = t_grid;
    out.values.resize(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        cplx acc = 0.0;
        for (const auto& m : bath.modes)
            acc += m.weight * std::exp(-cplx(m.kappa_mu, m.omega_mu) * t_grid[k]);
        out.values[k] = acc;
    }

    cplx integral = 0.0;
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        integral += 0.5 * (out.values[k - 1] + out.values[k]) * dt;
    if (std::abs(integral) < 1e-300)
        throw kernel_error("synthesize_kernel: kernel integrates to ~0, cannot normalize");
    for (auto& v : out.values) v /= integral;

    double kappa_min = bath.modes.front().kappa_mu;
    for (const auto& m : bath.modes) kappa_min = std::min(kappa_min, m.kappa_mu);
    if (t_grid.back() < 3.0 / kappa_min)
        out.truncation_warning = "grid ends at " + detail::g17(t_grid.back()) +
                                 " s, below 3x the slowest mode time " +
                                 detail::g17(1.0 / kappa_min) + " s; kernel tail truncated";
    return out;
}

struct ExponentialFit {
    double tau_fit = 0.0;    // s
    double amplitude = 0.0;  // fitted peak value of the magnitude envelope
    double residual = 0.0;   // RMS misfit relative to the peak magnitude
};

// Least-squares fit of A e^{-t/tau} to the magnitude envelope |values|.
// Log-linear regression seeds a Gauss-Newton refinement of (A, 1/tau) on the
// unweighted magnitudes.
inline ExponentialFit fit_exponential(const KernelSamples& samples) {
    const std::size_t n = samples.t.size();
    if (n < 10 || samples.values.size() != n)
        throw envelope_error("fit_exponential: need >= 10 samples");

    std::vector<double> mag(n);
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mag[k] = std::abs(samples.values[k]);
        peak = std::max(peak, mag[k]);
    }
    if (!(peak > 0.0)) throw envelope_error("fit_exponential: all samples are zero");

    // overall-decrease test: the mean magnitude of the last tenth must sit
    // well below the mean of the first tenth
    const std::size_t decile = std::max<std::size_t>(1, n / 10);
    double head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < decile; ++k) {
        head += mag[k];
        tail += mag[n - 1 - k];
    }
    if (!(tail <= 0.9 * head))
        throw envelope_error("fit_exponential: magnitude envelope is not decaying "
                             "(last-decile mean above 90% of first-decile mean)");

    // seed: regression of log magnitude on t over usable (nonzero) samples
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (mag[k] <= peak * 1e-15) continue;
        const double y = std::log(mag[k]);
        st += samples.t[k]; sy += y; stt += samples.t[k] * samples.t[k]; sty += samples.t[k] * y;
        ++used;
    }
    if (used < 2) throw envelope_error("fit_exponential: too few nonzero samples");
    const double fu = static_cast<double>(used);
    double rate = -(fu * sty - st * sy) / (fu * stt - st * st);
    double amp = std::exp((sy + rate * st) / fu);
    if (!(rate > 0.0)) rate = 1.0 / samples.t.back();

    // Gauss-Newton on r_k = A e^{-rate t_k} - m_k
    for (int iter = 0; iter < 200; ++iter) {
        double jaa = 0.0, jar = 0.0, jrr = 0.0, ga = 0.0, gr = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = std::exp(-rate * samples.t[k]);
            const double r = amp * e - mag[k];
            const double da = e;
            const double dr = -amp * samples.t[k] * e;
            jaa += da * da; jar += da * dr; jrr += dr * dr;
            ga += da * r; gr += dr * r;
        }
        const double det = jaa * jrr - jar * jar;
        if (std::abs(det) < 1e-300) break;
        const double step_a = (jrr * ga - jar * gr) / det;
        const double step_r = (jaa * gr - jar * ga) / det;
        double scale = 1.0;
        while (rate - scale * step_r <= 0.0) scale *= 0.5;  // keep the decay rate positive
        amp -= scale * step_a;
        rate -= scale * step_r;
        if (std::abs(step_a) <= 1e-15 * std::abs(amp) &&
            std::abs(step_r) <= 1e-15 * std::abs(rate))
            break;
    }

    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = amp * std::exp(-rate * samples.t[k]) - mag[k];
        ss += r * r;
    }

    ExponentialFit fit;
    fit.tau_fit = 1.0 / rate;
    fit.amplitude = amp;
    fit.residual = std::sqrt(ss / static_cast<double>(n)) / peak;
    return fit;
}

// Bridge into the dynamics module: each bath mode becomes one kernel term.
// A term amplitude a e^{-(kappa + i omega) t} scaled to the unit-integral
// basis has amplitude (w/rho)/N with rho = kappa + i omega, N = sum w/rho,
// so the amplitudes sum to 1 by construction.
inline KernelSpec kernel_to_spec(const BathSpec& bath) {
    check_bath(bath);
    if (bath.modes.size() > 64)
        throw kernel_error("kernel_to_spec: at most 64 bath modes supported, got " +
                           std::to_string(bath.modes.size()));
    cplx norm = 0.0;
    for (const auto& m : bath.modes) norm += m.weight / cplx(m.kappa_mu, m.omega_mu);
    if (std::abs(norm) < 1e-300)
        throw kernel_error("kernel_to_spec: kernel integrates to ~0, cannot normalize");

    std::vector<KernelTerm> terms;
    terms.reserve(bath.modes.size());
    for (const auto& m : bath.modes)
        terms.push_back({m.weight / cplx(m.kappa_mu, m.omega_mu) / norm, m.kappa_mu, m.omega_mu});
    return KernelSpec::sum_of_exponentials(std::move(terms));
}

// CSV interface: header `kappa_mu_rad_s,omega_mu_rad_s,weight_re,weight_im`.
inline BathSpec parse_bath_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    BathSpec bath;
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i + 1);
        std::string_view line = detail::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_fields(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"kappa_mu_rad_s", "omega_mu_rad_s",
                                                   "weight_re", "weight_im"})
                throw config_error("bath CSV line " + std::to_string(line_no) +
                                   ": expected header "
                                   "kappa_mu_rad_s,omega_mu_rad_s,weight_re,weight_im");
            header_seen = true;
            continue;
        }
        if (fields.size() != 4)
            throw config_error("bath CSV line " + std::to_string(line_no) + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
        BathMode mode;
        mode.kappa_mu = detail::parse_number(fields[0], "kappa_mu_rad_s", line_no);
        mode.omega_mu = detail::parse_number(fields[1], "omega_mu_rad_s", line_no);
        mode.weight = cplx(detail::parse_number(fields[2], "weight_re", line_no),
                           detail::parse_number(fields[3], "weight_im", line_no));
        bath.modes.push_back(mode);
    }
    if (!header_seen) throw config_error("bath CSV: missing header line");
    check_bath(bath);
    return bath;
}

inline BathSpec load_bath_csv(const std::string& path) {
    return parse_bath_csv(read_text_file(path));
}

} // namespace phototherm
