#include "qvlens/binary.hpp"

#include <cmath>
#include <stdexcept>

#include "qvlens/lens.hpp"
#include "qvlens/vacuum.hpp"

namespace qvlens {

namespace {

double pow6(double x) {
    const double x3 = x * x * x;
    return x3 * x3;
}

// Kepler's equation E - e sin E = M by Newton iteration.
double eccentric_anomaly(double mean_anomaly, double eccentricity) {
    double e_anom = mean_anomaly + eccentricity * std::sin(mean_anomaly);
    for (int i = 0; i < 50; ++i) {
        const double f = e_anom - eccentricity * std::sin(e_anom) - mean_anomaly;
        const double fp = 1.0 - eccentricity * std::cos(e_anom);
        const double delta = f / fp;
        e_anom -= delta;
        if (std::abs(delta) <= 1e-12 * (1.0 + std::abs(e_anom))) return e_anom;
    }
    throw std::runtime_error("Kepler iteration did not converge within 50 steps");
}

}  // namespace

void OrbitalElements::validate() const {
    if (!(period > 0.0)) throw std::domain_error("orbital period must be positive");
    if (!(semi_major_axis > 0.0)) throw std::domain_error("semi-major axis must be positive");
    if (!(eccentricity >= 0.0) || !(eccentricity < 1.0))
        throw std::domain_error("eccentricity must lie in [0, 1)");
    if (!(inclination >= 0.0) || !(inclination <= kPi))
        throw std::domain_error("inclination must lie in [0, pi]");
}

void BinaryScenario::validate() const {
    pulsar_a.validate();
    pulsar_b.validate();
    orbit.validate();
    if (!(beam_half_width > 0.0)) throw std::domain_error("beam half width must be positive");
    if (a_coupling < 0.0) throw std::domain_error("coupling must be >= 0");
}

const NeutronStar& BinaryScenario::lens_star() const {
    return lensed == LensedBody::a_by_b ? pulsar_b : pulsar_a;
}

const NeutronStar& BinaryScenario::source_star() const {
    return lensed == LensedBody::a_by_b ? pulsar_a : pulsar_b;
}

Vec3 BinaryScenario::line_of_sight() const {
    return {0.0, std::sin(orbit.inclination), std::cos(orbit.inclination)};
}

Vec3 orbital_state(const OrbitalElements& orbit, double t) {
    orbit.validate();
    double mean = orbit.epoch_phase + 2.0 * kPi * t / orbit.period;
    mean = std::fmod(mean, 2.0 * kPi);
    if (mean < 0.0) mean += 2.0 * kPi;

    const double e_anom = eccentric_anomaly(mean, orbit.eccentricity);
    const double a = orbit.semi_major_axis;
    const double x = a * (std::cos(e_anom) - orbit.eccentricity);
    const double y = a * std::sqrt(1.0 - orbit.eccentricity * orbit.eccentricity) *
                     std::sin(e_anom);

    const double cw = std::cos(orbit.argument_of_periastron);
    const double sw = std::sin(orbit.argument_of_periastron);
    return {cw * x - sw * y, sw * x + cw * y, 0.0};
}

double spin_phase(const NeutronStar& star, double t) {
    if (!(star.spin_period > 0.0)) throw std::domain_error("spin period must be positive");
    double phase = std::fmod(star.spin_phase0 + 2.0 * kPi * t / star.spin_period, 2.0 * kPi);
    if (phase < 0.0) phase += 2.0 * kPi;
    return phase;
}

namespace {

struct SampleGeometry {
    double s_los = 0.0;  // m, lens-to-source separation along the line of sight
    double rho = 0.0;    // m, transverse offset of the lens from the line of sight
    Vec3 transverse;     // lens position relative to the line, perpendicular part
};

SampleGeometry geometry_at(const BinaryScenario& scenario, double t) {
    const Vec3 rel = orbital_state(scenario.orbit, t);  // B relative to A
    const Vec3 lens_rel_source = scenario.lensed == LensedBody::a_by_b ? rel : -rel;
    const Vec3 los = scenario.line_of_sight();
    SampleGeometry geom;
    geom.s_los = dot(lens_rel_source, los);
    geom.transverse = lens_rel_source - los * geom.s_los;
    geom.rho = geom.transverse.norm();
    return geom;
}

}  // namespace

double los_offset(const BinaryScenario& scenario, double t) {
    scenario.validate();
    return geometry_at(scenario, t).rho;
}

std::vector<FluxSample> flux_series(const BinaryScenario& scenario, double t0, double t1,
                                    double dt, const PhysicalConstants& constants) {
    scenario.validate();
    if (!(dt > 0.0)) throw std::domain_error("time step must be positive");
    if (!(t0 < t1)) throw std::domain_error("need t0 < t1");

    const NeutronStar& lens = scenario.lens_star();
    const Vec3 los = scenario.line_of_sight();
    const double base_coefficient = 5.0 * kPi * scenario.a_coupling * lens.surface_field *
                                    lens.surface_field * pow6(lens.radius);

    const auto n_samples = static_cast<std::size_t>((t1 - t0) / dt * (1.0 + 1e-12)) + 1;
    std::vector<FluxSample> samples;
    samples.reserve(n_samples);

    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        const SampleGeometry geom = geometry_at(scenario, t);
        const double phase = spin_phase(lens, t);

        FluxSample sample;
        sample.t = t;
        sample.rho_t = geom.rho;
        sample.spin_phase_lens = phase;

        if (geom.s_los <= 0.0) {
            // Lens behind the source: the beam never approaches it.
            samples.push_back(sample);
            continue;
        }
        if (geom.rho <= lens.radius) {
            sample.relative_flux = 0.0;
            sample.eclipse = true;
            samples.push_back(sample);
            continue;
        }

        // Ray frame: propagation toward the observer, +x from lens to ray.
        const Vec3 z_hat = los;
        const Vec3 x_hat = -(geom.transverse / geom.rho);
        const Vec3 y_hat = cross(z_hat, x_hat);
        const Vec3 axis_world = rotate_about_axis(lens.dipole_axis, lens.spin_axis, phase);
        const Vec3 axis_ray = {dot(axis_world, x_hat), dot(axis_world, y_hat),
                               dot(axis_world, z_hat)};
        const double factor =
            base_coefficient == 0.0
                ? 1.0
                : dipole_orientation_factor(axis_ray, scenario.index_model.projection);
        const double k_mag = base_coefficient * factor;

        const double a_total = total_magnification(solve_images_deff(
            lens.mass, lens.radius, geom.s_los, k_mag, geom.rho, constants));
        const double a_grav = total_magnification(solve_images_deff(
            lens.mass, lens.radius, geom.s_los, 0.0, geom.rho, constants));

        const double beam_shift = k_mag / pow6(geom.rho);
        double beam_factor;
        if (scenario.beam_profile == BeamProfile::tophat) {
            beam_factor = std::abs(beam_shift) <= scenario.beam_half_width ? 1.0 : 0.0;
        } else {
            const double x = beam_shift / scenario.beam_half_width;
            beam_factor = std::exp(-0.5 * x * x);
        }

        if (beam_factor == 0.0 || a_grav == 0.0) {
            sample.relative_flux = 0.0;
            sample.eclipse = true;
        } else {
            sample.relative_flux = (a_total / a_grav) * beam_factor;
        }
        samples.push_back(sample);
    }
    return samples;
}

std::vector<std::pair<double, double>> eclipse_windows(const std::vector<FluxSample>& samples) {
    std::vector<std::pair<double, double>> windows;
    bool open = false;
    double start = 0.0;
    double last = 0.0;
    for (const FluxSample& sample : samples) {
        if (sample.eclipse) {
            if (!open) {
                open = true;
                start = sample.t;
            }
            last = sample.t;
        } else if (open) {
            windows.emplace_back(start, last);
            open = false;
        }
    }
    if (open) windows.emplace_back(start, last);
    return windows;
}

}  // namespace qvlens
