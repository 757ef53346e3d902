#pragma once

// System parameters: cavity, mechanical mode, exciton reservoir, photothermal
// channel, drive, membrane geometry. Includes the flat key=value config format.
//
// Unit conventions: every rate and frequency is stored in angular units
// (rad/s). Config keys suffixed _hz are multiplied by 2*pi on input and
// divided by 2*pi on output; keys suffixed _rad_s pass through verbatim.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phototherm/constants.hpp"
#include "phototherm/errors.hpp"

namespace phototherm {

struct CavityParams {
    double kappa_c = 0.0;   // amplitude decay rate (HWHM), rad/s
    double delta_c = 0.0;   // laser-cavity detuning, rad/s
    double length_L = 0.0;  // cavity length, m
};

struct MechParams {
    double omega_m = 0.0;   // mechanical frequency, rad/s
    double kappa_m = 0.0;   // intrinsic amplitude damping (HWHM), rad/s
    double g0 = 0.0;        // single-photon optomechanical coupling, rad/s (signed)
};

enum class OmegaInMode { geometry, zero, explicit_value };

struct ExcitonParams {
    double gamma = 0.0;               // exciton dephasing rate, rad/s
    double omega_c2_over_gamma = 0.0; // |Omega_c|^2 / gamma, rad/s (stored form)
    OmegaInMode omega_in_mode = OmegaInMode::geometry;
    cplx omega_in_explicit{0.0, 0.0}; // used only for explicit_value

    // Cavity-field--exciton coupling Omega_c (real, >= 0 by convention).
    double omega_c_coupling() const { return std::sqrt(omega_c2_over_gamma * gamma); }
};

struct PhotothermalParams {
    double eta_th_over_gamma = 0.0;  // dimensionless, signed
    double tau_th = 0.0;             // thermal relaxation time, s
};

struct DriveParams {
    double power_in = 0.0;   // W
    double lambda_L = 0.0;   // laser wavelength, m
};

struct MembraneGeometry {
    double thickness_d = 0.0;  // membrane thickness, m
};

struct SystemParams {
    CavityParams cavity;
    MechParams mech;
    ExcitonParams exciton;
    PhotothermalParams photothermal;
    DriveParams drive;
    MembraneGeometry geometry;
};

// Free-field/cavity-field exciton coupling ratio Omega_in / Omega_c for a
// membrane of thickness d at the cavity midpoint:
//   -(i/sqrt(2)) exp(i (k_L d/2 - 2 L delta_c / c)) sin(k_L d/2),  k_L = 2 pi / lambda.
// Magnitude is bounded by 1/sqrt(2).
inline cplx omega_ratio(double lambda_L, double thickness_d, double length_L, double delta_c) {
    if (lambda_L <= 0.0) throw params_error("omega_ratio: lambda_L must be > 0");
    if (thickness_d <= 0.0) throw params_error("omega_ratio: thickness_d must be > 0");
    if (thickness_d >= lambda_L)
        throw params_error("omega_ratio: requires thickness_d < lambda_L");
    const double half_kd = two_pi / lambda_L * thickness_d / 2.0;
    const double phase = half_kd - 2.0 * length_L * delta_c / c_light;
    return -ci / std::sqrt(2.0) * std::exp(ci * phase) * std::sin(half_kd);
}

// Invert the resonant weak-coupling absorption fraction: Omega_c^2 / gamma = f_abs * kappa_c / 4.
inline double coupling_from_absorption(double f_abs, double kappa_c) {
    if (!(f_abs >= 0.0 && f_abs <= 1.0))
        throw params_error("coupling_from_absorption: f_abs must lie in [0, 1]");
    if (kappa_c <= 0.0)
        throw params_error("coupling_from_absorption: kappa_c must be > 0");
    return f_abs * kappa_c / 4.0;
}

// Omega_in at the detuning stored in p (geometry mode re-evaluates the phase).
inline cplx omega_in(const SystemParams& p) {
    switch (p.exciton.omega_in_mode) {
        case OmegaInMode::zero:
            return {0.0, 0.0};
        case OmegaInMode::explicit_value:
            return p.exciton.omega_in_explicit;
        case OmegaInMode::geometry:
            return p.exciton.omega_c_coupling() *
                   omega_ratio(p.drive.lambda_L, p.geometry.thickness_d,
                               p.cavity.length_L, p.cavity.delta_c);
    }
    throw params_error("omega_in: unknown omega_in_mode");
}

// Input field amplitude sqrt(P_in / (hbar omega_L)), real positive gauge.
inline double a_in_bar(const DriveParams& d) {
    const double omega_L = two_pi * c_light / d.lambda_L;
    return std::sqrt(d.power_in / (hbar * omega_L));
}

inline SystemParams with_detuning(SystemParams p, double delta_c) {
    p.cavity.delta_c = delta_c;
    return p;
}

// Hard admissibility checks; throws params_error naming the offending field.
inline void check_params(const SystemParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw params_error(std::string("invalid parameters: ") + what);
    };
    require(p.cavity.kappa_c > 0.0, "kappa_c must be > 0");
    require(p.cavity.length_L > 0.0, "length_L must be > 0");
    require(p.mech.omega_m > 0.0, "omega_m must be > 0");
    require(p.mech.kappa_m >= 0.0, "kappa_m must be >= 0");
    require(std::isfinite(p.mech.g0), "g0 must be finite");
    require(p.exciton.gamma > 0.0, "gamma must be > 0");
    require(p.exciton.omega_c2_over_gamma >= 0.0, "omega_c2_over_gamma must be >= 0");
    require(p.photothermal.tau_th > 0.0, "tau_th must be > 0");
    require(p.drive.power_in >= 0.0, "power_in must be >= 0");
    require(p.drive.lambda_L > 0.0, "lambda_L must be > 0");
    require(p.geometry.thickness_d > 0.0, "thickness_d must be > 0");
    require(p.geometry.thickness_d < p.drive.lambda_L, "thickness_d must be < lambda_L");
}

// Scale-hierarchy diagnostics. Advisory only: desk-scale test families
// deliberately compress the separations, so violations warn instead of throw.
inline std::vector<std::string> hierarchy_warnings(const SystemParams& p, double factor = 10.0) {
    std::vector<std::string> w;
    auto warn = [&w](bool ok, const std::string& msg) { if (!ok) w.push_back(msg); };
    warn(p.exciton.gamma >= factor * p.cavity.kappa_c,
         "hierarchy: gamma < " + std::to_string(factor) + " * kappa_c");
    warn(p.cavity.kappa_c >= factor * p.mech.omega_m,
         "hierarchy: kappa_c < " + std::to_string(factor) + " * omega_m");
    warn(p.mech.omega_m >= factor * p.mech.kappa_m,
         "hierarchy: omega_m < " + std::to_string(factor) + " * kappa_m");
    warn(p.mech.omega_m * p.photothermal.tau_th >= factor,
         "hierarchy: omega_m * tau_th < " + std::to_string(factor));
    return w;
}

// ---------------------------------------------------------------------------
// Config format: one `key = value` per line, '#' starts a comment, UTF-8.
// ---------------------------------------------------------------------------

struct ParsedConfig {
    SystemParams params;
    std::vector<std::string> warnings;  // hierarchy advisories
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view text, const std::string& key, int line) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw config_error("config line " + std::to_string(line) + ": key '" + key +
                           "': unparsable number '" + std::string(text) + "'");
    return value;
}

// Known numeric keys. The unit suffix is part of the key name; presenting a
// known base quantity with the wrong suffix is reported as a suffix mismatch.
inline const std::array<std::string_view, 16>& known_numeric_keys() {
    static const std::array<std::string_view, 16> keys = {
        "kappa_c_hz",     "delta_c_hz",   "length_L_m",   "omega_m_hz",
        "kappa_m_rad_s",  "g0_hz",        "gamma_hz",     "f_abs",
        "omega_c2_over_gamma_hz", "eta_th_over_gamma", "tau_th_s", "power_in_w",
        "lambda_L_m",     "thickness_d_m", "omega_in_re_hz", "omega_in_im_hz",
    };
    return keys;
}

inline std::string_view strip_unit_suffix(std::string_view key) {
    for (std::string_view suffix : {"_rad_s", "_hz", "_m", "_s", "_w"}) {
        if (key.size() > suffix.size() &&
            key.substr(key.size() - suffix.size()) == suffix)
            return key.substr(0, key.size() - suffix.size());
    }
    return key;
}

} // namespace detail

inline ParsedConfig parse_config(std::string_view text) {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(line_no) +
                               ": expected 'key = value', got '" + std::string(line) + "'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty())
            throw config_error("config line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key))
            throw config_error("config line " + std::to_string(line_no) + ": duplicate key '" +
                               key + "' (first on line " + std::to_string(kv[key].second) + ")");
        kv[key] = {value, line_no};
    }

    // Reject unknown keys up front, distinguishing unit-suffix mistakes.
    for (const auto& [key, vl] : kv) {
        if (key == "omega_in_mode") continue;
        bool known = false;
        for (auto k : detail::known_numeric_keys()) known |= (key == k);
        if (known) continue;
        const std::string_view base = detail::strip_unit_suffix(key);
        for (auto k : detail::known_numeric_keys()) {
            if (detail::strip_unit_suffix(k) == base)
                throw config_error("config line " + std::to_string(vl.second) + ": key '" + key +
                                   "': unit-suffix mismatch, expected '" + std::string(k) + "'");
        }
        throw config_error("config line " + std::to_string(vl.second) + ": unknown key '" + key + "'");
    }

    auto take = [&kv](std::string_view key) -> std::optional<std::pair<std::string, int>> {
        auto it = kv.find(std::string(key));
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto need_number = [&take](std::string_view key) {
        auto v = take(key);
        if (!v) throw config_error("config: missing mandatory key '" + std::string(key) + "'");
        return detail::parse_number(v->first, std::string(key), v->second);
    };
    auto optional_number = [&take](std::string_view key) -> std::optional<double> {
        auto v = take(key);
        if (!v) return std::nullopt;
        return detail::parse_number(v->first, std::string(key), v->second);
    };

    SystemParams p;
    p.cavity.kappa_c = two_pi * need_number("kappa_c_hz");
    p.cavity.delta_c = two_pi * need_number("delta_c_hz");
    p.cavity.length_L = need_number("length_L_m");
    p.mech.omega_m = two_pi * need_number("omega_m_hz");
    p.mech.kappa_m = need_number("kappa_m_rad_s");
    p.mech.g0 = two_pi * need_number("g0_hz");
    p.exciton.gamma = two_pi * need_number("gamma_hz");

    const auto f_abs = optional_number("f_abs");
    const auto oc2 = optional_number("omega_c2_over_gamma_hz");
    if (f_abs && oc2)
        throw config_error("config: keys 'f_abs' and 'omega_c2_over_gamma_hz' are mutually exclusive");
    if (!f_abs && !oc2)
        throw config_error("config: missing mandatory key 'f_abs' (or 'omega_c2_over_gamma_hz')");
    p.exciton.omega_c2_over_gamma =
        f_abs ? coupling_from_absorption(*f_abs, p.cavity.kappa_c) : two_pi * *oc2;

    p.photothermal.eta_th_over_gamma = need_number("eta_th_over_gamma");
    p.photothermal.tau_th = need_number("tau_th_s");
    p.drive.power_in = need_number("power_in_w");
    p.drive.lambda_L = need_number("lambda_L_m");
    p.geometry.thickness_d = need_number("thickness_d_m");

    std::string mode = "geometry";
    if (auto m = take("omega_in_mode")) mode = m->first;
    const auto oin_re = optional_number("omega_in_re_hz");
    const auto oin_im = optional_number("omega_in_im_hz");
    if (mode == "geometry" || mode == "zero") {
        if (oin_re || oin_im)
            throw config_error("config: omega_in_re_hz/omega_in_im_hz are only meaningful with "
                               "omega_in_mode = explicit");
        p.exciton.omega_in_mode = (mode == "zero") ? OmegaInMode::zero : OmegaInMode::geometry;
    } else if (mode == "explicit") {
        if (!oin_re || !oin_im)
            throw config_error("config: omega_in_mode = explicit requires omega_in_re_hz and "
                               "omega_in_im_hz");
        p.exciton.omega_in_mode = OmegaInMode::explicit_value;
        p.exciton.omega_in_explicit = cplx(two_pi * *oin_re, two_pi * *oin_im);
    } else {
        throw config_error("config: omega_in_mode must be geometry, zero or explicit, got '" +
                           mode + "'");
    }

    check_params(p);
    return ParsedConfig{p, hierarchy_warnings(p)};
}

namespace detail {

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// Inverse of parse_config up to decimal round-trip (<= 1 ulp per stored field).
inline std::string serialize_config(const SystemParams& p) {
    using detail::g17;
    std::string out;
    auto emit = [&out](std::string_view key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    };
    emit("kappa_c_hz", g17(p.cavity.kappa_c / two_pi));
    emit("delta_c_hz", g17(p.cavity.delta_c / two_pi));
    emit("length_L_m", g17(p.cavity.length_L));
    emit("omega_m_hz", g17(p.mech.omega_m / two_pi));
    emit("kappa_m_rad_s", g17(p.mech.kappa_m));
    emit("g0_hz", g17(p.mech.g0 / two_pi));
    emit("gamma_hz", g17(p.exciton.gamma / two_pi));
    emit("omega_c2_over_gamma_hz", g17(p.exciton.omega_c2_over_gamma / two_pi));
    emit("eta_th_over_gamma", g17(p.photothermal.eta_th_over_gamma));
    emit("tau_th_s", g17(p.photothermal.tau_th));
    emit("power_in_w", g17(p.drive.power_in));
    emit("lambda_L_m", g17(p.drive.lambda_L));
    emit("thickness_d_m", g17(p.geometry.thickness_d));
    switch (p.exciton.omega_in_mode) {
        case OmegaInMode::geometry:
            emit("omega_in_mode", "geometry");
            break;
        case OmegaInMode::zero:
            emit("omega_in_mode", "zero");
            break;
        case OmegaInMode::explicit_value:
            emit("omega_in_mode", "explicit");
            emit("omega_in_re_hz", g17(p.exciton.omega_in_explicit.real() / two_pi));
            emit("omega_in_im_hz", g17(p.exciton.omega_in_explicit.imag() / two_pi));
            break;
    }
    return out;
}

} // namespace phototherm
