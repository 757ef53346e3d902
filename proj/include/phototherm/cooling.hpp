#pragma once

// Analytic mechanical damping rates: the photothermal (exciton-mediated)
// contribution kappa_th and the radiation-pressure sideband contribution
// kappa_rp. Both are amplitude (HWHM) rates, additive with kappa_m, so they
// compare directly against the real part of the drift-matrix eigenvalue.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "phototherm/constants.hpp"
#include "phototherm/errors.hpp"
#include "phototherm/parallel.hpp"
#include "phototherm/params.hpp"
#include "phototherm/steadystate.hpp"

namespace phototherm {

struct CoolingOptions {
    // Validity guard for the adiabatic photothermal rate; requires
    // omega_m * tau_th >= regime_min (slow thermal response).
    double regime_min = 10.0;
};

// Photothermal damping rate. Positive values damp (cool), negative drive.
// Linear in power_in, eta_th_over_gamma and omega_c2_over_gamma; odd in
// delta_c when Omega_in = 0.
inline double kappa_th(const SystemParams& p, const CoolingOptions& opt = {}) {
    const double om_tau = p.mech.omega_m * p.photothermal.tau_th;
    if (om_tau < opt.regime_min)
        throw out_of_regime_error("kappa_th: omega_m * tau_th = " + std::to_string(om_tau) +
                                  " below regime guard " + std::to_string(opt.regime_min));

    const double kappa = p.cavity.kappa_c;
    const double delta = p.cavity.delta_c;
    const double omega_m = p.mech.omega_m;
    const double oc2_g = p.exciton.omega_c2_over_gamma;
    const double omega_c = p.exciton.omega_c_coupling();
    const double photons = a_in_bar(p.drive) * a_in_bar(p.drive);

    // r = Omega_in / Omega_c; with Omega_c = 0 the rate vanishes identically.
    if (omega_c == 0.0 || oc2_g == 0.0) return 0.0;
    const cplx r = omega_in(p) / omega_c;

    const double prefactor = photons * 2.0 * p.mech.g0 /
                             ((kappa * kappa + delta * delta) * om_tau) *
                             p.photothermal.eta_th_over_gamma * oc2_g;
    const cplx brace =
        (1.0 + r) * (delta * std::conj(r) + ci * kappa) / cplx(kappa, -(omega_m + delta)) +
        (1.0 + std::conj(r)) * (delta * r - ci * kappa) / cplx(kappa, -(omega_m - delta));
    return prefactor * brace.real();
}

// Radiation-pressure sideband damping rate, amplitude convention:
//   g0^2 |a_bar|^2 [ kappa_c/(kappa_c^2+(delta+omega_m)^2) - kappa_c/(kappa_c^2+(delta-omega_m)^2) ].
// Uses the full mean-field |a_bar|^2. Positive values damp.
inline double kappa_rp(const SystemParams& p) {
    const double kappa = p.cavity.kappa_c;
    const double delta = p.cavity.delta_c;
    const double omega_m = p.mech.omega_m;
    const double n_cav = std::norm(mean_fields(p).a_bar);
    const double lower = kappa / (kappa * kappa + (delta + omega_m) * (delta + omega_m));
    const double upper = kappa / (kappa * kappa + (delta - omega_m) * (delta - omega_m));
    return p.mech.g0 * p.mech.g0 * n_cav * (lower - upper);
}

struct CoolingResult {
    double delta_c;    // rad/s
    double kappa_th;   // rad/s
    double kappa_rp;   // rad/s
    double kappa_eff;  // kappa_m + kappa_th + kappa_rp, rad/s
};

inline CoolingResult cooling_at(const SystemParams& p, const CoolingOptions& opt = {}) {
    CoolingResult r;
    r.delta_c = p.cavity.delta_c;
    r.kappa_th = kappa_th(p, opt);
    r.kappa_rp = kappa_rp(p);
    r.kappa_eff = p.mech.kappa_m + r.kappa_th + r.kappa_rp;
    return r;
}

// Detuning sweep. Points are independent, so they run under parallel_for
// (PHOTOTHERM_THREADS caps the pool); per-point failures are rethrown with
// the grid index attached and results never depend on evaluation order.
inline std::vector<CoolingResult> sweep(const SystemParams& p,
                                        const std::vector<double>& detunings,
                                        const CoolingOptions& opt = {}) {
    std::vector<CoolingResult> out(detunings.size());
    parallel_for(detunings.size(), [&](std::size_t i) {
        try {
            out[i] = cooling_at(with_detuning(p, detunings[i]), opt);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("sweep point " + std::to_string(i) + " (delta_c = " +
                                     std::to_string(detunings[i]) + " rad/s): " + e.what());
        }
    });
    return out;
}

} // namespace phototherm
