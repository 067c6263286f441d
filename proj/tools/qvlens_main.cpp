#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvlens/binary.hpp"
#include "qvlens/config.hpp"
#include "qvlens/lens.hpp"
#include "qvlens/ray.hpp"
#include "qvlens/table.hpp"
#include "qvlens/vacuum.hpp"
#include "qvlens/version.hpp"

namespace {

using namespace qvlens;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

std::string physics_hash(const RunConfig& config) {
    RunConfig canonical = config;
    canonical.output.path.clear();
    return fnv1a_hex(serialize_config(canonical));
}

void write_output(const RunConfig& config, const Table& table) {
    const bool arcsec = config.output.angles == AngleUnit::arcsec;
    const std::string body = config.output.format == OutputFormat::csv
                                 ? to_csv(table, arcsec)
                                 : to_json(table, physics_hash(config), arcsec);
    if (config.output.path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(config.output.path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output path: " + config.output.path);
    out << body;
    if (!out) throw ConfigError("failed writing output path: " + config.output.path);
}

const NeutronStar& selected_star(const RunConfig& config) {
    return config.lens_geometry.lens_star == 'A' ? config.star_a : config.star_b;
}

Table run_deflect(const RunConfig& config, double rho_min, double rho_max,
                  std::size_t samples, double phase) {
    const NeutronStar& star = selected_star(config);
    if (!(rho_min >= star.radius))
        throw ConfigError("deflect: --rho-min must be at least the star radius");
    if (!(rho_min < rho_max)) throw ConfigError("deflect: need --rho-min < --rho-max");
    if (samples < 2) throw ConfigError("deflect: need --samples >= 2");

    const auto records = deflection_sweep(star, config.index_model, rho_min, rho_max, samples,
                                          phase, config.integrator, config.constants);
    Table table;
    table.add_column("rho_m");
    table.add_column("theta_grav_rad", Table::Kind::real, true);
    table.add_column("theta_mag_rad", Table::Kind::real, true);
    table.add_column("theta_total_rad", Table::Kind::real, true);
    for (const auto& rec : records)
        table.add_row({rec.rho, rec.theta_grav, rec.theta_mag, rec.theta_total});
    return table;
}

Table run_modulation(const RunConfig& config, double rho, std::size_t n_phases) {
    const NeutronStar& star = selected_star(config);
    if (!(rho > star.radius))
        throw ConfigError("modulation: --rho must exceed the star radius");
    if (n_phases < 8) throw ConfigError("modulation: need --phases >= 8");

    const auto samples = modulation_sweep(star, config.index_model, rho, n_phases,
                                          config.integrator, config.constants);
    Table table;
    table.add_column("phase_rad");  // rotational phase, never unit-converted
    table.add_column("theta_mag_rad", Table::Kind::real, true);
    for (const auto& s : samples) table.add_row({s.phase, s.theta_mag});
    return table;
}

Table run_lens(const RunConfig& config, const std::vector<double>& u_values) {
    if (u_values.empty()) throw ConfigError("lens: need at least one --u value");
    for (const double u : u_values)
        if (!(u > 0.0)) throw ConfigError("lens: --u values must be positive");

    const LensConfiguration lc = config.lens_configuration();
    const double r_e = einstein_radius(lc.lens.mass, lc.d_lens, lc.d_source, config.constants);

    Table table;
    table.add_column("u");
    table.add_column("A_closed_form");
    table.add_column("A_images");
    table.add_column("n_images", Table::Kind::integer);
    for (const double u : u_values) {
        const auto images =
            solve_images(lc, source_offset_from_u(u, r_e), 0.0, config.constants);
        table.add_row({u, point_lens_magnification(u), total_magnification(images),
                       static_cast<double>(images.size())});
    }
    return table;
}

Table run_binary_flux(const RunConfig& config, double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw ConfigError("binary-flux: need --dt > 0");
    if (!(t0 < t1)) throw ConfigError("binary-flux: need --t0 < --t1");

    const auto samples = flux_series(config.scenario(), t0, t1, dt, config.constants);
    Table table;
    table.add_column("t_s");
    table.add_column("relative_flux");
    table.add_column("eclipse", Table::Kind::integer);
    table.add_column("rho_m");
    table.add_column("spin_phase_rad");  // rotational phase, never unit-converted
    for (const auto& s : samples)
        table.add_row({s.t, s.relative_flux, s.eclipse ? 1.0 : 0.0, s.rho_t,
                       s.spin_phase_lens});
    return table;
}

Table run_threshold(const RunConfig& config, double target) {
    if (!(target > 0.0) || !(target < 1.0))
        throw ConfigError("threshold: --target must lie in (0, 1)");
    const double b0 =
        field_threshold_for_effect(config.lens_configuration(), target, config.constants);
    Table table;
    table.add_column("target_fraction");
    table.add_column("b0_threshold_t");
    table.add_row({target, b0});
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetized-vacuum and gravitational light deflection around neutron stars"};
    app.set_version_flag("--version", qvlens::kVersion);
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string format_override;
    std::string out_override;
    std::string angles_override;
    bool have_out = false;
    app.add_option("--config", config_path, "Path to a run configuration file");
    app.add_option("--format", format_override, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_override, "Output path (default: stdout)")
        ->each([&](const std::string&) { have_out = true; });
    app.add_option("--angles", angles_override, "Unit for deflection angle columns")
        ->check(CLI::IsMember({"rad", "arcsec"}));

    auto* deflect = app.add_subcommand("deflect", "Deflection angle vs impact parameter");
    double rho_min = 2e4, rho_max = 1e6, phase = 0.0;
    std::size_t samples = 40;
    deflect->add_option("--rho-min", rho_min, "Smallest impact parameter (m)");
    deflect->add_option("--rho-max", rho_max, "Largest impact parameter (m)");
    deflect->add_option("--samples", samples, "Number of log-spaced samples");
    deflect->add_option("--phase", phase, "Spin phase of the dipole axis (rad)");

    auto* modulation = app.add_subcommand("modulation", "Deflection vs rotational phase");
    double mod_rho = 5e4;
    std::size_t n_phases = 64;
    modulation->add_option("--rho", mod_rho, "Impact parameter (m)");
    modulation->add_option("--phases", n_phases, "Number of phase samples in [0, 2pi)");

    auto* lens = app.add_subcommand("lens", "Point-lens magnification vs source offset");
    std::vector<double> u_values{0.1, 0.5, 1.0, 3.0, 10.0};
    lens->add_option("--u", u_values, "Source offsets in Einstein radii");

    auto* binary = app.add_subcommand("binary-flux", "Relative flux of the lensed pulsar");
    double t0 = 0.0, t1 = 9900.0, dt = 1.0;
    binary->add_option("--t0", t0, "Start time (s)");
    binary->add_option("--t1", t1, "End time (s)");
    binary->add_option("--dt", dt, "Sample spacing (s)");

    auto* threshold = app.add_subcommand("threshold", "Surface field for a target lensing effect");
    double target = 0.05;
    threshold->add_option("--target", target, "Magnetic/gravitational bending ratio at R_E");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : qvlens::load_config(config_path);
        if (!format_override.empty())
            config.output.format =
                format_override == "csv" ? OutputFormat::csv : OutputFormat::json;
        if (have_out) config.output.path = out_override;
        if (!angles_override.empty())
            config.output.angles = angles_override == "rad" ? AngleUnit::rad : AngleUnit::arcsec;

        Table table;
        if (deflect->parsed()) table = run_deflect(config, rho_min, rho_max, samples, phase);
        else if (modulation->parsed()) table = run_modulation(config, mod_rho, n_phases);
        else if (lens->parsed()) table = run_lens(config, u_values);
        else if (binary->parsed()) table = run_binary_flux(config, t0, t1, dt);
        else if (threshold->parsed()) table = run_threshold(config, target);

        write_output(config, table);
        return kExitOk;
    } catch (const qvlens::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}
