#pragma once

// Linewidth-vs-detuning datasets and the single-parameter coupling fit.
// kappa_th is exactly linear in eta_th/gamma, so with the shape function
// S_i = kappa_th(delta_i) at unit coupling the weighted least-squares
// estimate is closed form. A separate check fits fitted couplings against
// the (2,1) drumhead mode profile.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phototherm/constants.hpp"
#include "phototherm/cooling.hpp"
#include "phototherm/errors.hpp"
#include "phototherm/io.hpp"
#include "phototherm/params.hpp"

namespace phototherm {

struct DataPoint {
    double delta_c = 0.0;          // rad/s
    double kappa_measured = 0.0;   // rad/s
    double sigma = 0.0;            // rad/s, meaningful only when the file has the column
};

struct DatasetMeta {
    std::string label;
    std::optional<double> lambda_L;   // m
    std::optional<double> power_in;   // W
    std::optional<double> kappa_m;    // rad/s
    std::optional<double> f_abs;      // fraction
    std::optional<double> beam_x;     // normalized membrane coordinate
    std::optional<double> beam_y;
};

struct Dataset {
    std::vector<DataPoint> points;
    bool has_sigma = false;
    DatasetMeta meta;
};

// CSV with header `delta_c_hz,kappa_eff_rad_s[,sigma_rad_s]` plus optional
// `#meta key=value` sidecar lines. Detunings arrive in Hz and are converted
// to rad/s here; everything downstream is angular.
inline Dataset parse_dataset(std::string_view text) {
    const auto lines = detail::split_lines(text);
    Dataset data;
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i + 1);
        std::string_view line = detail::trim(lines[i]);
        if (line.empty()) continue;
        if (line.rfind("#meta", 0) == 0) {
            std::string_view rest = detail::trim(line.substr(5));
            const std::size_t eq = rest.find('=');
            if (eq == std::string_view::npos)
                throw config_error("dataset line " + std::to_string(line_no) +
                                   ": #meta line is not key=value");
            const std::string key(detail::trim(rest.substr(0, eq)));
            const std::string value(detail::trim(rest.substr(eq + 1)));
            if (key == "label") data.meta.label = value;
            else if (key == "lambda_l_m") data.meta.lambda_L = detail::parse_number(value, key, line_no);
            else if (key == "power_in_w") data.meta.power_in = detail::parse_number(value, key, line_no);
            else if (key == "kappa_m_rad_s") data.meta.kappa_m = detail::parse_number(value, key, line_no);
            else if (key == "f_abs") data.meta.f_abs = detail::parse_number(value, key, line_no);
            else if (key == "beam_x") data.meta.beam_x = detail::parse_number(value, key, line_no);
            else if (key == "beam_y") data.meta.beam_y = detail::parse_number(value, key, line_no);
            else throw config_error("dataset line " + std::to_string(line_no) +
                                    ": unknown meta key '" + key + "'");
            continue;
        }
        if (line.front() == '#') continue;
        const auto fields = detail::split_fields(line);
        if (!header_seen) {
            if (fields == std::vector<std::string>{"delta_c_hz", "kappa_eff_rad_s"})
                data.has_sigma = false;
            else if (fields == std::vector<std::string>{"delta_c_hz", "kappa_eff_rad_s",
                                                        "sigma_rad_s"})
                data.has_sigma = true;
            else
                throw config_error("dataset line " + std::to_string(line_no) +
                                   ": expected header delta_c_hz,kappa_eff_rad_s[,sigma_rad_s]");
            header_seen = true;
            continue;
        }
        const std::size_t want = data.has_sigma ? 3 : 2;
        if (fields.size() != want)
            throw config_error("dataset line " + std::to_string(line_no) + ": expected " +
                               std::to_string(want) + " fields, got " +
                               std::to_string(fields.size()));
        DataPoint pt;
        pt.delta_c = two_pi * detail::parse_number(fields[0], "delta_c_hz", line_no);
        pt.kappa_measured = detail::parse_number(fields[1], "kappa_eff_rad_s", line_no);
        if (data.has_sigma) {
            pt.sigma = detail::parse_number(fields[2], "sigma_rad_s", line_no);
            if (!(pt.sigma > 0.0))
                throw config_error("dataset line " + std::to_string(line_no) +
                                   ": sigma_rad_s must be > 0");
        }
        data.points.push_back(pt);
    }
    if (!header_seen) throw config_error("dataset: missing header line");
    return data;
}

inline Dataset load_dataset(const std::string& path) {
    return parse_dataset(read_text_file(path));
}

// Overlay dataset metadata onto a base parameter set. f_abs reconstructs the
// exciton coupling through the cavity linewidth of the base parameters.
inline SystemParams apply_meta(const SystemParams& base, const DatasetMeta& meta) {
    SystemParams p = base;
    if (meta.lambda_L) p.drive.lambda_L = *meta.lambda_L;
    if (meta.power_in) p.drive.power_in = *meta.power_in;
    if (meta.kappa_m) p.mech.kappa_m = *meta.kappa_m;
    if (meta.f_abs)
        p.exciton.omega_c2_over_gamma = coupling_from_absorption(*meta.f_abs, p.cavity.kappa_c);
    return p;
}

struct FitResult {
    double eta_over_gamma = 0.0;
    double std_error = 0.0;
    double residual_rms = 0.0;  // rad/s, unweighted RMS of y - model
    std::size_t n_points = 0;
};

struct FitOptions {
    bool include_rp = true;  // subtract the radiation-pressure channel from the data
    CoolingOptions cooling;
};

// Weighted least squares for the single linear parameter:
//   y_i = kappa_m + kappa_rp,i + (eta/gamma) S_i,  S_i = kappa_th(delta_i)|_{eta/gamma=1}
// eta* = sum w S r / sum w S^2 with r_i the channel-subtracted data.
inline FitResult fit_eta(const Dataset& data, const SystemParams& base,
                         const FitOptions& opt = {}) {
    if (data.points.size() < 2)
        throw params_error("fit_eta: need >= 2 data points, got " +
                           std::to_string(data.points.size()));
    const SystemParams params = apply_meta(base, data.meta);

    const std::size_t n = data.points.size();
    std::vector<double> S(n), r(n), w(n);
    double max_abs_S = 0.0, scale = params.mech.kappa_m;
    for (std::size_t i = 0; i < n; ++i) {
        SystemParams q = with_detuning(params, data.points[i].delta_c);
        q.photothermal.eta_th_over_gamma = 1.0;
        S[i] = kappa_th(q, opt.cooling);
        r[i] = data.points[i].kappa_measured - params.mech.kappa_m -
               (opt.include_rp ? kappa_rp(q) : 0.0);
        w[i] = data.has_sigma ? 1.0 / (data.points[i].sigma * data.points[i].sigma) : 1.0;
        max_abs_S = std::max(max_abs_S, std::abs(S[i]));
        scale = std::max(scale, std::abs(data.points[i].kappa_measured));
    }
    if (max_abs_S <= 1e-30 * std::max(scale, 1e-300))
        throw unidentifiable_fit_error(
            "fit_eta: kappa_th shape vanishes on every detuning (max |S| = " +
            detail::g17(max_abs_S) + " rad/s); eta is unidentifiable");

    double sws2 = 0.0, swsr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sws2 += w[i] * S[i] * S[i];
        swsr += w[i] * S[i] * r[i];
    }
    const double eta = swsr / sws2;

    double chi2 = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double res = r[i] - eta * S[i];
        chi2 += w[i] * res * res;
        ss += res * res;
    }
    const double fn = static_cast<double>(n);
    const double s2 = n > 1 ? chi2 / (fn - 1.0) : 0.0;

    FitResult fit;
    fit.eta_over_gamma = eta;
    fit.std_error = std::sqrt(s2 / sws2);
    fit.residual_rms = std::sqrt(ss / fn);
    fit.n_points = n;
    return fit;
}

// (2,1) drumhead mode shape on the unit square: one interior nodal line.
inline double mode_shape_21(double x, double y) {
    return std::sin(2.0 * M_PI * x) * std::sin(M_PI * y);
}

struct PositionedFit {
    double x = 0.0;  // normalized membrane coordinates in [0,1]
    double y = 0.0;
    double eta_over_gamma = 0.0;
};

struct ModeProfile21 {
    double eta_max_over_gamma = 0.0;
    std::vector<double> residuals;  // |eta_i| - eta_max |phi(x_i, y_i)| per fit
};

// Least-squares amplitude of |eta(x,y)| = eta_max |phi21(x,y)| over the
// positioned fits: eta_max = sum |phi||eta| / sum phi^2.
inline ModeProfile21 mode_profile_check(const std::vector<PositionedFit>& fits) {
    if (fits.empty()) throw params_error("mode_profile_check: need >= 1 positioned fit");
    for (std::size_t i = 0; i < fits.size(); ++i)
        if (!(fits[i].x >= 0.0 && fits[i].x <= 1.0 && fits[i].y >= 0.0 && fits[i].y <= 1.0))
            throw params_error("mode_profile_check: fit " + std::to_string(i) +
                               " position (" + detail::g17(fits[i].x) + ", " +
                               detail::g17(fits[i].y) + ") outside the unit square");

    double num = 0.0, den = 0.0;
    for (const auto& f : fits) {
        const double phi = std::abs(mode_shape_21(f.x, f.y));
        num += phi * std::abs(f.eta_over_gamma);
        den += phi * phi;
    }
    ModeProfile21 out;
    out.eta_max_over_gamma = den > 0.0 ? num / den : 0.0;
    out.residuals.reserve(fits.size());
    for (const auto& f : fits)
        out.residuals.push_back(std::abs(f.eta_over_gamma) -
                                out.eta_max_over_gamma * std::abs(mode_shape_21(f.x, f.y)));
    return out;
}

} // namespace phototherm
