#pragma once

// Classical steady state of the coupled cavity/exciton mean fields and the
// input-output relation for the reflected field.

#include <cmath>
#include <complex>
#include <string>

#include "phototherm/constants.hpp"
#include "phototherm/errors.hpp"
#include "phototherm/params.hpp"

namespace phototherm {

struct MeanFields {
    cplx a_bar;      // intracavity field amplitude
    cplx c_bar_sum;  // aggregated exciton amplitude
    double a_in;     // input amplitude sqrt(P/hbar omega_L), real positive gauge
};

// Closed-form mean fields. Derived by eliminating the exciton amplitude from
// the two coupled stationarity conditions; guarded against the (unphysical in
// the explored regime) collapse of the shared denominator.
inline MeanFields mean_fields(const SystemParams& p) {
    const double kappa = p.cavity.kappa_c;
    const double delta = p.cavity.delta_c;
    const double gamma = p.exciton.gamma;
    const double omega_c = p.exciton.omega_c_coupling();
    const cplx omega_i = omega_in(p);
    const double a_in = a_in_bar(p.drive);

    const cplx lead = cplx(kappa, -delta) * gamma;
    const cplx coupling = (omega_c + omega_i) * std::conj(omega_c - omega_i);
    const cplx denom = lead + coupling;
    if (std::abs(denom) < 1e-30 * std::max(std::abs(lead), std::abs(coupling)))
        throw singular_parameters_error(
            "mean_fields: steady-state denominator vanishes (|D| = " +
            std::to_string(std::abs(denom)) + ")");

    const double root = std::sqrt(2.0 / kappa);
    MeanFields f;
    f.a_in = a_in;
    f.a_bar = -root * a_in * (kappa * gamma + omega_i * std::conj(omega_c - omega_i)) / denom;
    f.c_bar_sum = root * a_in * (ci * kappa * omega_c - delta * omega_i) / denom;
    return f;
}

// Reflected amplitude: a_out = a_in + sqrt(2 kappa_c) a_bar - i sqrt(2/kappa_c) Omega_in^* c_bar.
inline cplx output_field(const SystemParams& p, const MeanFields& f) {
    const double kappa = p.cavity.kappa_c;
    return f.a_in + std::sqrt(2.0 * kappa) * f.a_bar -
           ci * std::sqrt(2.0 / kappa) * std::conj(omega_in(p)) * f.c_bar_sum;
}

// Fraction of input power missing from the reflected beam, evaluated from the
// full steady state on cavity resonance. Approaches 4 Omega_c^2 / (gamma kappa_c)
// only in the weak-coupling limit.
inline double absorbed_fraction(const SystemParams& p) {
    const SystemParams resonant = with_detuning(p, 0.0);
    const MeanFields f = mean_fields(resonant);
    if (f.a_in == 0.0)
        throw params_error("absorbed_fraction: requires power_in > 0");
    const double ratio = std::abs(output_field(resonant, f) / f.a_in);
    return 1.0 - ratio * ratio;
}

} // namespace phototherm
