#pragma once

#include <stdexcept>
#include <string>

namespace phototherm {

// Configuration / input problems: bad keys, unparsable numbers, broken files.
// The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Physically inadmissible parameter values (negative rates, d >= lambda, ...).
struct params_error : std::runtime_error {
    explicit params_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Steady-state denominator collapsed (anti-crossing of dressed modes).
struct singular_parameters_error : std::runtime_error {
    explicit singular_parameters_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Analytic rate requested outside its validity regime (omega_m * tau_th too small).
struct out_of_regime_error : std::runtime_error {
    explicit out_of_regime_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Effective-mode extraction found two eigenvalue pairs near omega_m.
// The CLI maps this to exit code 4.
struct ambiguous_mode_error : std::runtime_error {
    explicit ambiguous_mode_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Ring-down trace too short to constrain kappa or omega.
struct insufficient_span_error : std::runtime_error {
    explicit insufficient_span_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Susceptibility probe frequency sits on an eigenvalue's imaginary part.
struct near_singular_error : std::runtime_error {
    near_singular_error(const std::string& msg, std::size_t point_index)
        : std::runtime_error(msg), index(point_index) {}
    std::size_t index;
};

// Kernel specification violations (term count, unnormalized amplitudes, ...).
struct kernel_error : std::runtime_error {
    explicit kernel_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Kernel magnitude does not decay; single-exponential fit meaningless.
struct envelope_error : std::runtime_error {
    explicit envelope_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Least-squares design degenerate (all shape values vanish).
// The CLI maps this to exit code 3.
struct unidentifiable_fit_error : std::runtime_error {
    explicit unidentifiable_fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace phototherm
