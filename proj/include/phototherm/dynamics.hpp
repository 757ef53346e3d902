#pragma once

// Linear fluctuation dynamics. The noise-free Langevin system for
// (a, a+, b, b+, c, c+, m_1, m_1+, ...) is assembled into a complex drift
// matrix G with dz/dt = G z. The thermal memory kernel is realized exactly
// through auxiliary convolution variables m_j, so eigenvalues of G serve as
// the independent oracle for the analytic damping rates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "phototherm/constants.hpp"
#include "phototherm/errors.hpp"
#include "phototherm/params.hpp"
#include "phototherm/steadystate.hpp"

namespace phototherm {

enum class KernelKind { exponential, instantaneous, sum_of_exponentials };

// One normalized kernel term amplitude * (rate + i freq) * exp(-(rate + i freq) t);
// each basis term integrates to 1, so the amplitudes must sum to 1.
struct KernelTerm {
    cplx amplitude;
    double rate;       // rad/s, > 0
    double frequency;  // rad/s, oscillatory part exp(-i freq t)
};

struct KernelSpec {
    KernelKind kind = KernelKind::exponential;
    double tau_th = 0.0;            // exponential kernel only
    std::vector<KernelTerm> terms;  // sum_of_exponentials only

    static KernelSpec exponential(double tau) {
        if (tau <= 0.0) throw kernel_error("KernelSpec: tau_th must be > 0");
        return {KernelKind::exponential, tau, {}};
    }
    static KernelSpec instantaneous() { return {KernelKind::instantaneous, 0.0, {}}; }
    static KernelSpec sum_of_exponentials(std::vector<KernelTerm> terms) {
        if (terms.empty()) throw kernel_error("KernelSpec: no kernel terms");
        if (terms.size() > 64)
            throw kernel_error("KernelSpec: at most 64 kernel terms supported, got " +
                               std::to_string(terms.size()));
        cplx sum = 0.0;
        for (const auto& t : terms) {
            if (t.rate <= 0.0) throw kernel_error("KernelSpec: term rate must be > 0");
            sum += t.amplitude;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw kernel_error("KernelSpec: term amplitudes must sum to 1, got |sum - 1| = " +
                               std::to_string(std::abs(sum - 1.0)));
        return {KernelKind::sum_of_exponentials, 0.0, std::move(terms)};
    }

    std::size_t aux_pairs() const {
        switch (kind) {
            case KernelKind::exponential: return 1;
            case KernelKind::instantaneous: return 0;
            case KernelKind::sum_of_exponentials: return terms.size();
        }
        return 0;
    }
};

enum class ReverseFeed { eta, zero };

// Variable ordering: index 0 a, 1 a+, 2 b, 2+1 b+, 4 c, 5 c+, then one
// (m_j, m_j+) pair per kernel term. Dagger rows are the exact complex
// conjugates of their partner rows (bitwise, by construction).
struct DriftMatrix {
    Eigen::MatrixXcd G;
    KernelKind kind = KernelKind::exponential;
    double omega_m = 0.0;  // mechanical frequency hint for mode extraction
};

inline constexpr int idx_a = 0;
inline constexpr int idx_b = 2;
inline constexpr int idx_c = 4;
inline constexpr int idx_m0 = 6;

inline DriftMatrix build_drift(const SystemParams& p, const KernelSpec& kernel,
                               ReverseFeed feed = ReverseFeed::eta) {
    check_params(p);
    const MeanFields mf = mean_fields(p);
    const double omega_c = p.exciton.omega_c_coupling();
    const cplx omega_i = omega_in(p);
    const double eta_th = p.photothermal.eta_th_over_gamma * p.exciton.gamma;
    const cplx g_ab = p.mech.g0 * mf.a_bar;          // cavity <- mechanics drive
    const cplx eta_c = eta_th * mf.c_bar_sum;        // photothermal force coefficient

    const int n = static_cast<int>(6 + 2 * kernel.aux_pairs());
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);

    // a row
    G(idx_a, idx_a) = -cplx(p.cavity.kappa_c, -p.cavity.delta_c);
    G(idx_a, idx_b) = -ci * g_ab;
    G(idx_a, idx_b + 1) = -ci * g_ab;
    // b row: radiation pressure; the kernel force couples to the m variables
    G(idx_b, idx_a) = -ci * p.mech.g0 * std::conj(mf.a_bar);
    G(idx_b, idx_a + 1) = -ci * g_ab;
    G(idx_b, idx_b) = -cplx(p.mech.kappa_m, p.mech.omega_m);
    // c row: cavity feed plus (optionally) the direct mechanical feed
    G(idx_c, idx_a) = -ci * (omega_c + omega_i);
    G(idx_c, idx_c) = -p.exciton.gamma;
    if (feed == ReverseFeed::eta) {
        G(idx_c, idx_b) = -ci * eta_c;
        G(idx_c, idx_b + 1) = -ci * eta_c;
    }

    switch (kernel.kind) {
        case KernelKind::instantaneous:
            // delta kernel: m == c, the force acts without lag
            G(idx_b, idx_c) = -ci * std::conj(eta_c);
            G(idx_b, idx_c + 1) = -ci * eta_c;
            break;
        case KernelKind::exponential: {
            const double rate = 1.0 / kernel.tau_th;
            G(idx_m0, idx_c) = rate;
            G(idx_m0, idx_m0) = -rate;
            G(idx_b, idx_m0) = -ci * std::conj(eta_c);
            G(idx_b, idx_m0 + 1) = -ci * eta_c;
            break;
        }
        case KernelKind::sum_of_exponentials:
            for (std::size_t j = 0; j < kernel.terms.size(); ++j) {
                const auto& term = kernel.terms[j];
                const cplx pole(term.rate, term.frequency);  // d m_j/dt = pole (c - m_j)
                const int m = idx_m0 + static_cast<int>(2 * j);
                G(m, idx_c) = pole;
                G(m, m) = -pole;
                G(idx_b, m) = -ci * std::conj(eta_c) * term.amplitude;
                G(idx_b, m + 1) = -ci * eta_c * std::conj(term.amplitude);
            }
            break;
    }

    // dagger rows by exact conjugate pairing: G(i^, j^) = conj(G(i, j))
    for (int i = 0; i < n; i += 2)
        for (int j = 0; j < n; j += 2) {
            G(i + 1, j + 1) = std::conj(G(i, j));
            G(i + 1, j) = std::conj(G(i, j + 1));
        }

    return DriftMatrix{std::move(G), kernel.kind, p.mech.omega_m};
}

struct EffectiveMode {
    cplx eigenvalue;    // member of the pair with Im > 0
    double kappa_eff;   // -Re(eigenvalue), amplitude damping rate
    double omega_eff;   // |Im(eigenvalue)|
};

// Pick the eigenvalue pair closest to +-omega_m in imaginary part. If two
// distinct pairs both land within 10% of omega_m, the assignment is ambiguous.
inline EffectiveMode effective_mode(const DriftMatrix& drift) {
    if (drift.omega_m <= 0.0)
        throw ambiguous_mode_error("effective_mode: omega_m hint must be > 0");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(drift.G, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw ambiguous_mode_error("effective_mode: eigensolver failed to converge");

    // one representative per conjugate pair: keep Im >= 0
    std::vector<cplx> candidates;
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
        const cplx ev = solver.eigenvalues()(i);
        if (ev.imag() >= 0.0) candidates.push_back(ev);
    }
    if (candidates.empty())
        throw ambiguous_mode_error("effective_mode: no eigenvalue with Im >= 0");

    std::sort(candidates.begin(), candidates.end(), [&](cplx u, cplx v) {
        return std::abs(u.imag() - drift.omega_m) < std::abs(v.imag() - drift.omega_m);
    });
    const double tol = 0.1 * drift.omega_m;
    if (candidates.size() >= 2 && std::abs(candidates[0].imag() - drift.omega_m) <= tol &&
        std::abs(candidates[1].imag() - drift.omega_m) <= tol)
        throw ambiguous_mode_error(
            "effective_mode: two eigenvalue pairs within 10% of omega_m: Im = " +
            std::to_string(candidates[0].imag()) + " and " +
            std::to_string(candidates[1].imag()));

    const cplx ev = candidates.front();
    return EffectiveMode{ev, -ev.real(), std::abs(ev.imag())};
}

inline EffectiveMode effective_mode(const DriftMatrix& drift, const SystemParams& p) {
    DriftMatrix hinted{drift.G, drift.kind, p.mech.omega_m};
    return effective_mode(hinted);
}

struct RingdownTrace {
    std::vector<double> t;
    std::vector<cplx> b;
    bool used_expm_fallback = false;  // eigenvector basis was ill-conditioned
};

// Propagate z(0) = b0 e_b + conj(b0) e_b+ and sample the b component on a
// uniform grid. Uses the eigendecomposition z(t) = V exp(D t) V^{-1} z(0);
// if V is ill-conditioned (defective G), falls back to repeated application
// of the scaling-and-squaring matrix exponential of G dt.
inline RingdownTrace simulate_ringdown(const DriftMatrix& drift, cplx b0, double t_final,
                                       std::size_t n_samples) {
    if (!(t_final > 0.0)) throw params_error("simulate_ringdown: t_final must be > 0");
    if (n_samples < 2) throw params_error("simulate_ringdown: need at least 2 samples");
    const int n = static_cast<int>(drift.G.rows());

    Eigen::VectorXcd z0 = Eigen::VectorXcd::Zero(n);
    z0(idx_b) = b0;
    z0(idx_b + 1) = std::conj(b0);

    RingdownTrace trace;
    trace.t.resize(n_samples);
    trace.b.resize(n_samples);
    const double dt = t_final / static_cast<double>(n_samples - 1);
    for (std::size_t k = 0; k < n_samples; ++k) trace.t[k] = dt * static_cast<double>(k);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(drift.G, /*computeEigenvectors=*/true);
    double cond = std::numeric_limits<double>::infinity();
    if (solver.info() == Eigen::Success) {
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(solver.eigenvectors());
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (smin > 0.0) cond = svd.singularValues()(0) / smin;
    }

    if (solver.info() == Eigen::Success && cond <= 1e12) {
        const Eigen::VectorXcd coef = solver.eigenvectors().partialPivLu().solve(z0);
        const auto& evals = solver.eigenvalues();
        const Eigen::RowVectorXcd row_b = solver.eigenvectors().row(idx_b);
        for (std::size_t k = 0; k < n_samples; ++k) {
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += row_b(j) * std::exp(evals(j) * trace.t[k]) * coef(j);
            trace.b[k] = acc;
        }
        return trace;
    }

    trace.used_expm_fallback = true;
    const Eigen::MatrixXcd step = (drift.G * dt).exp();
    Eigen::VectorXcd z = z0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        trace.b[k] = z(idx_b);
        if (k + 1 < n_samples) z = step * z;
    }
    return trace;
}

struct DampingFit {
    double kappa = 0.0;             // amplitude decay rate, rad/s
    double omega = 0.0;             // oscillation frequency, rad/s
    double log_residual_rms = 0.0;  // rms residual of the log-magnitude fit
    bool beating = false;           // envelope not monotone (several modes excited)
};

// Two independent linear regressions: log|b| against t gives kappa, the
// unwrapped phase against t gives omega. Preconditions are checked on the
// fitted values: the trace must cover >= 3 oscillation periods and >= 1/kappa
// of decay, otherwise the regression is unconstrained.
inline DampingFit fit_damping(const std::vector<double>& t, const std::vector<cplx>& b) {
    const std::size_t n = t.size();
    if (n != b.size() || n < 4)
        throw insufficient_span_error("fit_damping: need >= 4 matching samples");

    std::vector<double> logmag(n), phase(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double mag = std::abs(b[k]);
        if (!(mag > 0.0))
            throw insufficient_span_error("fit_damping: zero magnitude at sample " +
                                          std::to_string(k));
        logmag[k] = std::log(mag);
        phase[k] = std::arg(b[k]);
    }
    // unwrap phase (sampling must stay below pi per step)
    double offset = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        double d = phase[k] + offset - phase[k - 1];
        while (d > M_PI) { offset -= two_pi; d -= two_pi; }
        while (d < -M_PI) { offset += two_pi; d += two_pi; }
        phase[k] += offset;
    }

    auto regress = [&t, n](const std::vector<double>& y) {
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            st += t[k]; sy += y[k]; stt += t[k] * t[k]; sty += t[k] * y[k];
        }
        const double fn = static_cast<double>(n);
        const double denom = fn * stt - st * st;
        const double slope = (fn * sty - st * sy) / denom;
        const double intercept = (sy - slope * st) / fn;
        return std::pair{slope, intercept};
    };

    const auto [slope_mag, icp_mag] = regress(logmag);
    const auto [slope_ph, icp_ph] = regress(phase);
    (void)icp_ph;

    DampingFit fit;
    fit.kappa = -slope_mag;
    fit.omega = -slope_ph;  // b ~ exp(-i omega t) accumulates negative phase

    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = logmag[k] - (icp_mag + slope_mag * t[k]);
        ss += r * r;
    }
    fit.log_residual_rms = std::sqrt(ss / static_cast<double>(n));

    for (std::size_t k = 1; k < n && !fit.beating; ++k)
        if (std::abs(b[k]) > std::abs(b[k - 1]) * (1.0 + 1e-10)) fit.beating = true;

    const double periods = std::abs(phase.back() - phase.front()) / two_pi;
    if (periods < 3.0)
        throw insufficient_span_error("fit_damping: trace covers " + std::to_string(periods) +
                                      " oscillation periods, need >= 3");
    const double decay = logmag.front() - logmag.back();
    if (decay < 1.0)
        throw insufficient_span_error("fit_damping: trace decays by " + std::to_string(decay) +
                                      " e-foldings, need >= 1");
    return fit;
}

inline DampingFit fit_damping(const RingdownTrace& trace) {
    return fit_damping(trace.t, trace.b);
}

// b-component of the resolvent response: solve (i omega I - G) x = e_b per
// grid point. With this sign convention the mechanical resonance of the b
// component sits at omega = -omega_eff; |chi|^2 there is Lorentzian with
// half-width kappa_eff.
inline std::vector<cplx> susceptibility(const DriftMatrix& drift,
                                        const std::vector<double>& omega_grid) {
    const int n = static_cast<int>(drift.G.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(drift.G, false);
    const bool have_evs = solver.info() == Eigen::Success;

    Eigen::VectorXcd e_b = Eigen::VectorXcd::Zero(n);
    e_b(idx_b) = 1.0;

    std::vector<cplx> chi(omega_grid.size());
    for (std::size_t k = 0; k < omega_grid.size(); ++k) {
        const double w = omega_grid[k];
        if (have_evs) {
            double min_dist = std::numeric_limits<double>::infinity();
            for (int j = 0; j < solver.eigenvalues().size(); ++j)
                min_dist = std::min(min_dist, std::abs(w - solver.eigenvalues()(j).imag()));
            if (min_dist < 1e-9 * drift.omega_m)
                throw near_singular_error(
                    "susceptibility: probe omega = " + std::to_string(w) +
                    " rad/s sits on an eigenvalue imaginary part (distance " +
                    std::to_string(min_dist) + " rad/s, condition ~ " +
                    std::to_string(drift.omega_m / std::max(min_dist, 1e-300)) + ")",
                    k);
        }
        Eigen::MatrixXcd M = -drift.G;
        M.diagonal().array() += cplx(0.0, w);
        chi[k] = M.partialPivLu().solve(e_b)(idx_b);
    }
    return chi;
}

} // namespace phototherm
