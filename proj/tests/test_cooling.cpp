#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "phototherm/cooling.hpp"
#include "support.hpp"

using namespace phototherm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("kappa_th is exactly linear in power, coupling and absorber strength",
          "[cooling][property]") {
    const SystemParams base = testsupport::desk_scale();
    for (double frac : {-2.1, -0.7, 0.4, 1.0, 2.9}) {
        const SystemParams p = with_detuning(base, frac * base.cavity.kappa_c);
        const double k1 = kappa_th(p);
        INFO("detuning fraction " << frac);

        SystemParams q = p;
        q.drive.power_in *= 2.0;
        REQUIRE_THAT(kappa_th(q), WithinRel(2.0 * k1, 1e-12));

        q = p;
        q.photothermal.eta_th_over_gamma *= -3.0;
        REQUIRE_THAT(kappa_th(q), WithinRel(-3.0 * k1, 1e-12));

        // linearity in Omega_c^2/gamma requires the free-field channel off
        // (otherwise the interference ratio Omega_in/Omega_c shifts too)
        SystemParams r = p;
        r.exciton.omega_in_mode = OmegaInMode::zero;
        const double k_zero_in = kappa_th(r);
        r.exciton.omega_c2_over_gamma *= 5.0;
        REQUIRE_THAT(kappa_th(r), WithinRel(5.0 * k_zero_in, 1e-12));
    }
}

TEST_CASE("kappa_th is antisymmetric in detuning without the free-field channel",
          "[cooling][property]") {
    SystemParams p = testsupport::desk_scale();
    p.exciton.omega_in_mode = OmegaInMode::zero;
    for (double frac : {0.3, 1.0, 2.4}) {
        const double plus = kappa_th(with_detuning(p, frac * p.cavity.kappa_c));
        const double minus = kappa_th(with_detuning(p, -frac * p.cavity.kappa_c));
        INFO("detuning fraction " << frac);
        REQUIRE_THAT(plus + minus, WithinAbs(0.0, 1e-12 * std::abs(plus)));
    }
}

TEST_CASE("free-field interference breaks the detuning antisymmetry", "[cooling]") {
    // the residual scales like Im(r) * omega_m / kappa_c (~1e-4 here) --
    // small, but orders of magnitude above the rounding-level antisymmetry
    // of the zero-drive channel
    const SystemParams p = testsupport::desk_scale();  // geometry-derived Omega_in
    const double plus = kappa_th(with_detuning(p, p.cavity.kappa_c));
    const double minus = kappa_th(with_detuning(p, -p.cavity.kappa_c));
    REQUIRE(std::abs(plus + minus) > 1e-5 * std::abs(plus));
}

TEST_CASE("kappa_th vanishes without an absorber", "[cooling]") {
    SystemParams p = testsupport::desk_scale();
    p.exciton.omega_c2_over_gamma = 0.0;
    REQUIRE(kappa_th(with_detuning(p, p.cavity.kappa_c)) == 0.0);
}

TEST_CASE("slow-kernel regime guard", "[cooling]") {
    SystemParams p = testsupport::desk_scale();
    p.photothermal.tau_th = 1.0 / p.mech.omega_m;  // omega_m tau_th = 1 < 10
    REQUIRE_THROWS_AS(kappa_th(p), out_of_regime_error);

    CoolingOptions relaxed;
    relaxed.regime_min = 0.5;
    REQUIRE_NOTHROW(kappa_th(p, relaxed));
}

TEST_CASE("experiment-scale damping rates, regression-pinned", "[cooling]") {
    // 50-digit reference values, set 1 at detunings of +-kappa_c
    const SystemParams p = testsupport::experiment_row(1);
    const double k = p.cavity.kappa_c;
    REQUIRE_THAT(kappa_th(with_detuning(p, -k)), WithinRel(-14.23351255632183379, 1e-12));
    REQUIRE_THAT(kappa_th(with_detuning(p, k)), WithinRel(14.233512499098112798, 1e-12));
    REQUIRE_THAT(kappa_rp(with_detuning(p, -k)), WithinRel(3.062813934176002968e-6, 1e-12));
    REQUIRE_THAT(kappa_rp(with_detuning(p, k)), WithinRel(-2.5411832047657868859e-6, 1e-12));
}

TEST_CASE("radiation-pressure channel heats red, cools blue for negative g0",
          "[cooling]") {
    // sign structure of the sideband asymmetry at the experiment scale: the
    // photothermal channel dominates it by ~6 orders of magnitude here
    const SystemParams p = testsupport::experiment_row(1);
    const double red = kappa_rp(with_detuning(p, -p.cavity.kappa_c));
    const double blue = kappa_rp(with_detuning(p, p.cavity.kappa_c));
    REQUIRE(red > 0.0);
    REQUIRE(blue < 0.0);
    REQUIRE(std::abs(kappa_th(with_detuning(p, p.cavity.kappa_c))) > 1e5 * std::abs(blue));
}

TEST_CASE("cooling_at composes the three channels", "[cooling]") {
    const SystemParams p = with_detuning(testsupport::desk_strong(),
                                         0.6 * testsupport::desk_strong().cavity.kappa_c);
    const CoolingResult r = cooling_at(p);
    REQUIRE(r.delta_c == p.cavity.delta_c);
    REQUIRE(r.kappa_th == kappa_th(p));
    REQUIRE(r.kappa_rp == kappa_rp(p));
    REQUIRE(r.kappa_eff == p.mech.kappa_m + r.kappa_th + r.kappa_rp);
}

TEST_CASE("sweep equals pointwise evaluation and is thread-count invariant",
          "[cooling][concurrency]") {
    const SystemParams p = testsupport::desk_scale();
    const std::vector<double> grid = testsupport::detuning_grid(p, 3.0, 41);

    setenv("PHOTOTHERM_THREADS", "1", 1);
    const auto serial = sweep(p, grid);
    setenv("PHOTOTHERM_THREADS", "5", 1);
    const auto threaded = sweep(p, grid);
    unsetenv("PHOTOTHERM_THREADS");

    REQUIRE(serial.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CoolingResult direct = cooling_at(with_detuning(p, grid[i]));
        REQUIRE(serial[i].kappa_eff == direct.kappa_eff);
        REQUIRE(threaded[i].kappa_th == serial[i].kappa_th);
        REQUIRE(threaded[i].kappa_rp == serial[i].kappa_rp);
        REQUIRE(threaded[i].kappa_eff == serial[i].kappa_eff);
    }
}

TEST_CASE("sweep failures name the offending grid point", "[cooling]") {
    SystemParams p = testsupport::desk_scale();
    p.photothermal.tau_th = 1e-4;  // trips the regime guard at every point
    const std::vector<double> grid = testsupport::detuning_grid(p, 1.0, 5);
    REQUIRE_THROWS_WITH(sweep(p, grid), Catch::Matchers::ContainsSubstring("sweep point"));
}
