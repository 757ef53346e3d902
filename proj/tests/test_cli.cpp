#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "phototherm/cooling.hpp"
#include "phototherm/io.hpp"
#include "phototherm/params.hpp"
#include "support.hpp"

// Exercises the installed command-line binary end to end. The binary path
// and the shipped config directory arrive as compile definitions.

namespace fs = std::filesystem;
using namespace phototherm;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    const fs::path dir = fs::current_path() / "cli_scratch";
    fs::create_directories(dir);
    return dir;
}

std::string config_path(const std::string& name) {
    return std::string(PHOTOTHERM_CONFIG_DIR) + "/" + name;
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path out = scratch_dir() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = scratch_dir() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;

    const std::string cmd = env_prefix + "\"" + PHOTOTHERM_BIN + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());

    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = fs::exists(out) ? read_text_file(out.string()) : "";
    r.err = fs::exists(err) ? read_text_file(err.string()) : "";
    return r;
}

double kv_double(const std::string& text, const std::string& key) {
    for (const auto& line : detail::split_lines(text)) {
        const std::string prefix = key + "=";
        if (line.rfind(prefix, 0) == 0) return std::stod(std::string(line.substr(prefix.size())));
    }
    FAIL("key '" << key << "' not found in output:\n" << text);
    return 0.0;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

// dataset CSV generated by the forward model under the given parameters
std::string make_dataset_csv(const SystemParams& p, std::size_t n_points) {
    std::string csv = "delta_c_hz,kappa_eff_rad_s\n";
    for (double delta : testsupport::detuning_grid(p, 1.5, n_points)) {
        const CoolingResult c = cooling_at(with_detuning(p, delta));
        csv += detail::g17(delta / two_pi) + "," + detail::g17(c.kappa_eff) + "\n";
    }
    return csv;
}

}  // namespace

TEST_CASE("sweep output is byte-identical across runs and thread counts", "[cli]") {
    const SystemParams p = testsupport::experiment_row(1);
    const std::string span = detail::g17(3.0 * p.cavity.kappa_c / two_pi);
    const fs::path out_a = scratch_dir() / "sweep_a.csv";
    const fs::path out_b = scratch_dir() / "sweep_b.csv";
    const fs::path out_c = scratch_dir() / "sweep_c.csv";
    const std::string common = "sweep --config \"" + config_path("dataset1.conf") +
                               "\" --detuning-from -" + span + " --detuning-to " + span +
                               " --points 401 --output \"";

    REQUIRE(run_cli(common + out_a.string() + "\"").code == 0);
    REQUIRE(run_cli(common + out_b.string() + "\"").code == 0);
    REQUIRE(run_cli(common + out_c.string() + "\"", "PHOTOTHERM_THREADS=1 ").code == 0);

    const std::string a = read_text_file(out_a.string());
    REQUIRE(a.size() > 1000);
    REQUIRE(a == read_text_file(out_b.string()));
    REQUIRE(a == read_text_file(out_c.string()));

    // regression pin: row with the largest kappa_eff, frozen on first run
    const auto lines = detail::split_lines(a);
    REQUIRE(lines.size() == 402);
    REQUIRE(lines[0] == "delta_c_hz,kappa_th_rad_s,kappa_rp_rad_s,kappa_eff_rad_s");
    std::size_t best = 1;
    double best_val = -1e300;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::split_fields(lines[i]);
        REQUIRE(fields.size() == 4);
        const double val = std::stod(fields[3]);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    REQUIRE(lines[best] ==
            "247679999.99999997,14.274103006835913,-2.7438714027824873e-06,16.07410026296451");
}

TEST_CASE("sweep on the decoupled config zeroes both channels", "[cli]") {
    const fs::path out = scratch_dir() / "sweep_dec.csv";
    const CliResult r = run_cli("sweep --config \"" + config_path("decoupled.conf") +
                                "\" --detuning-from -1e4 --detuning-to 1e4 --points 3 "
                                "--output \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    const auto lines = detail::split_lines(read_text_file(out.string()));
    REQUIRE(lines.size() == 4);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::split_fields(lines[i]);
        REQUIRE(std::stod(fields[1]) == 0.0);  // kappa_th
        REQUIRE(std::stod(fields[2]) == 0.0);  // kappa_rp
        REQUIRE(std::stod(fields[3]) == 0.1);  // bare kappa_m
    }
}

TEST_CASE("sweep usage errors exit with code 2", "[cli]") {
    const std::string out = (scratch_dir() / "unused.csv").string();
    REQUIRE(run_cli("sweep --config \"" + config_path("desk_scale.conf") +
                    "\" --detuning-from 0 --detuning-to 1 --points 0 --output \"" + out + "\"")
                .code == 2);
    REQUIRE(run_cli("sweep --config /no/such/file.conf --detuning-from 0 --detuning-to 1 "
                    "--output \"" + out + "\"")
                .code == 2);
    REQUIRE(run_cli("sweep --config \"" + config_path("desk_scale.conf") +
                    "\" --detuning-from 0 --detuning-to 1 --format tsv --output \"" + out + "\"")
                .code == 2);
    REQUIRE(run_cli("").code == 2);            // missing subcommand
    REQUIRE(run_cli("frobnicate").code == 2);  // unknown subcommand
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("sweep --help").code == 0);
}

TEST_CASE("fit recovers the generating coupling through the CLI", "[cli]") {
    const SystemParams p = testsupport::experiment_row(1);
    const fs::path data = scratch_dir() / "fit_data.csv";
    write_text_file(data.string(), make_dataset_csv(p, 21));

    const fs::path svg = scratch_dir() / "fit_overlay.svg";
    const CliResult r = run_cli("fit --config \"" + config_path("dataset1.conf") +
                                "\" --data \"" + data.string() + "\" --output \"" +
                                svg.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(kv_double(r.out, "eta_over_gamma"),
                 Catch::Matchers::WithinRel(p.photothermal.eta_th_over_gamma, 1e-10));
    REQUIRE(kv_double(r.out, "residual_rms_rad_s") < 1e-9);
    REQUIRE(kv_double(r.out, "n_points") == 21.0);

    const std::string overlay = read_text_file(svg.string());
    REQUIRE(count_occurrences(overlay, "<polyline") == 2);  // data + model
    REQUIRE(overlay.find("</svg>") != std::string::npos);
}

TEST_CASE("fit without absorber exits with the degenerate-fit code", "[cli]") {
    SystemParams dark = parse_config(read_text_file(config_path("dataset1.conf"))).params;
    dark.exciton.omega_c2_over_gamma = 0.0;
    const fs::path conf = scratch_dir() / "dark.conf";
    write_text_file(conf.string(), serialize_config(dark));

    const fs::path data = scratch_dir() / "fit_data_dark.csv";
    write_text_file(data.string(), make_dataset_csv(testsupport::experiment_row(1), 11));

    const CliResult r = run_cli("fit --config \"" + conf.string() + "\" --data \"" +
                                data.string() + "\"");
    REQUIRE(r.code == 3);
    REQUIRE(r.err.find("unidentifiable") != std::string::npos);
}

TEST_CASE("fit with a missing dataset exits with code 2", "[cli]") {
    REQUIRE(run_cli("fit --config \"" + config_path("dataset1.conf") +
                    "\" --data /no/such/data.csv")
                .code == 2);
}

TEST_CASE("simulate on the decoupled config reports the bare linewidth", "[cli]") {
    const CliResult r = run_cli("simulate --config \"" + config_path("decoupled.conf") +
                                "\" --t-final 60 --steps 24001");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(kv_double(r.out, "kappa_rad_s"), Catch::Matchers::WithinRel(0.1, 1e-6));
    REQUIRE_THAT(kv_double(r.out, "omega_rad_s"),
                 Catch::Matchers::WithinRel(two_pi * 100.0, 1e-9));
    REQUIRE(kv_double(r.out, "beating") == 0.0);
    REQUIRE(kv_double(r.out, "expm_fallback") == 0.0);
}

TEST_CASE("simulate matches the delta-kernel limit through the CLI", "[cli]") {
    SystemParams p = parse_config(read_text_file(config_path("desk_scale.conf"))).params;
    p = with_detuning(p, p.cavity.kappa_c);  // blue side: added damping
    const fs::path conf = scratch_dir() / "desk_blue.conf";
    write_text_file(conf.string(), serialize_config(p));

    const CliResult inst = run_cli("simulate --config \"" + conf.string() +
                                   "\" --kernel instantaneous --t-final 20 --steps 8001");
    const CliResult fast = run_cli("simulate --config \"" + conf.string() +
                                   "\" --kernel exponential --tau 1e-6 --t-final 20 --steps 8001");
    REQUIRE(inst.code == 0);
    REQUIRE(fast.code == 0);
    const double k_inst = kv_double(inst.out, "kappa_rad_s");
    const double k_fast = kv_double(fast.out, "kappa_rad_s");
    REQUIRE(k_inst > 0.1);  // detuning added real damping
    REQUIRE_THAT(k_fast, Catch::Matchers::WithinRel(k_inst, 0.01));
}

TEST_CASE("simulate usage errors exit with code 2", "[cli]") {
    REQUIRE(run_cli("simulate --config \"" + config_path("decoupled.conf") +
                    "\" --t-final 0")
                .code == 2);
    REQUIRE(run_cli("simulate --config \"" + config_path("decoupled.conf") + "\"").code == 2);
    REQUIRE(run_cli("simulate --config \"" + config_path("decoupled.conf") +
                    "\" --t-final 1 --kernel fancy")
                .code == 2);
}

TEST_CASE("validate passes the shipped families and fails an absurd threshold", "[cli]") {
    const CliResult desk = run_cli("validate --config \"" + config_path("desk_scale.conf") + "\"");
    REQUIRE(desk.code == 0);
    REQUIRE(kv_double(desk.out, "max_rel_deviation") <= 0.02);

    // the strong-coupling family sits outside the perturbative regime, so
    // the closed-form rates drift from the eigenvalue oracle near resonance;
    // the gap is physics, not noise, and needs a looser threshold
    const CliResult strong =
        run_cli("validate --config \"" + config_path("desk_strong.conf") + "\" --threshold 0.35");
    REQUIRE(strong.code == 0);
    REQUIRE(kv_double(strong.out, "max_rel_deviation") > 0.02);

    const CliResult dec = run_cli("validate --config \"" + config_path("decoupled.conf") + "\"");
    REQUIRE(dec.code == 0);

    REQUIRE(run_cli("validate --config \"" + config_path("desk_scale.conf") +
                    "\" --threshold 1e-12")
                .code == 1);
}

TEST_CASE("validate reports mode ambiguity with code 4", "[cli]") {
    // a span that parks grid detunings within 10% of omega_m makes the
    // cavity pair collide with the mechanical pair
    const CliResult r = run_cli("validate --config \"" + config_path("desk_scale.conf") +
                                "\" --points 3 --span 0.0105");
    REQUIRE(r.code == 4);
    REQUIRE(r.err.find("within 10%") != std::string::npos);
}

TEST_CASE("bath-kernel fits the single shipped mode", "[cli]") {
    const fs::path out = scratch_dir() / "kernel.csv";
    const CliResult r = run_cli("bath-kernel --bath \"" + config_path("bath_single.csv") +
                                "\" --output \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(kv_double(r.out, "tau_fit_s"), Catch::Matchers::WithinRel(5.0, 1e-6));
    REQUIRE(kv_double(r.out, "residual") < 1e-9);
    REQUIRE(r.err.empty());  // default grid covers the mode, no truncation warning

    const auto lines = detail::split_lines(read_text_file(out.string()));
    REQUIRE(lines[0] == "t_s,re_m,im_m,abs_m");
    REQUIRE(lines.size() == 513);
}

TEST_CASE("bath-kernel warns when the grid truncates the kernel", "[cli]") {
    const CliResult r = run_cli("bath-kernel --bath \"" + config_path("bath_single.csv") +
                                "\" --t-max 10");
    REQUIRE(r.code == 0);
    REQUIRE(r.err.find("truncated") != std::string::npos);
}

TEST_CASE("bath-kernel usage errors exit with code 2", "[cli]") {
    REQUIRE(run_cli("bath-kernel --bath /no/such/bath.csv").code == 2);
    REQUIRE(run_cli("bath-kernel --bath \"" + config_path("bath_single.csv") +
                    "\" --points 5")
                .code == 2);
    const fs::path empty = scratch_dir() / "empty.csv";
    write_text_file(empty.string(), "");
    REQUIRE(run_cli("bath-kernel --bath \"" + empty.string() + "\"").code == 2);
}

TEST_CASE("sweep SVG output is a one-series plot", "[cli]") {
    const fs::path out = scratch_dir() / "sweep_plot.svg";
    const CliResult r = run_cli("sweep --config \"" + config_path("desk_strong.conf") +
                                "\" --detuning-from -3e4 --detuning-to 3e4 --points 61 "
                                "--format svg --output \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    const std::string svg = read_text_file(out.string());
    REQUIRE(svg.find("<svg") != std::string::npos);
    REQUIRE(count_occurrences(svg, "<polyline") == 1);
    REQUIRE(svg.find("</svg>") != std::string::npos);
    REQUIRE(svg.find("kappa_eff") != std::string::npos);
}
