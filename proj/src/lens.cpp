#include "qvlens/lens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qvlens/dipole.hpp"
#include "qvlens/vacuum.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

namespace {

double pow6(double x) {
    const double x3 = x * x * x;
    return x3 * x3;
}

// Axisymmetric thin-lens mapping in lens-plane length units. For rho > 0:
//   beta(rho) = rho - d_eff * (theta_g(rho) + K / rho^6)
// with theta_g = r_g / rho (r_g = 4GM/c^2) and K the magnetic coefficient.
struct LensEquation {
    double r_g = 0.0;    // m, 4GM/c^2
    double d_eff = 0.0;  // m
    double k_mag = 0.0;  // rad m^7 coefficient of rho^-6

    double beta(double rho) const {
        return rho - d_eff * (r_g / rho + k_mag / pow6(rho));
    }
    double dbeta(double rho) const {
        return 1.0 + d_eff * (r_g / (rho * rho) + 6.0 * k_mag / (pow6(rho) * rho));
    }
    // Magnification of the image at signed impact rho for source offset beta_s.
    double magnification(double rho, double beta_s) const {
        const double ratio = beta_s / rho;
        return 1.0 / std::abs(ratio * dbeta(std::abs(rho)));
    }
    int parity(double rho, double beta_s) const {
        return (beta_s / rho) * dbeta(std::abs(rho)) > 0.0 ? +1 : -1;
    }
};

// Bisection refinement of a bracketed root of f(rho) = target.
template <typename F>
double bisect(const F& f, double lo, double hi, double target) {
    double flo = f(lo) - target;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((hi - lo) <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) return mid;
        const double fmid = f(mid) - target;
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

constexpr int kProbePoints = 512;

// All roots of beta(rho) = target on [rho_lo, rho_hi], isolated on a
// log-spaced probe grid. The rho^-6 term can create extra roots near the
// star at extreme fields.
std::vector<double> roots_on_positive_side(const LensEquation& eq, double rho_lo, double rho_hi,
                                           double target) {
    std::vector<double> roots;
    const double log_lo = std::log(rho_lo);
    const double log_hi = std::log(rho_hi);
    double prev_rho = rho_lo;
    double prev_val = eq.beta(prev_rho) - target;
    if (prev_val == 0.0) roots.push_back(prev_rho);
    for (int i = 1; i <= kProbePoints; ++i) {
        const double rho = std::exp(log_lo + (log_hi - log_lo) * i / kProbePoints);
        const double val = eq.beta(rho) - target;
        if (val == 0.0) {
            roots.push_back(rho);
        } else if ((prev_val < 0.0) != (val < 0.0)) {
            roots.push_back(bisect([&](double r) { return eq.beta(r); }, prev_rho, rho, target));
        }
        prev_rho = rho;
        prev_val = val;
    }
    return roots;
}

}  // namespace

void LensConfiguration::validate() const {
    lens.validate();
    if (!(d_lens > 0.0) || !(d_source > d_lens))
        throw std::domain_error("lens distances must satisfy 0 < d_lens < d_source");
    if (a_coupling < 0.0) throw std::domain_error("coupling must be >= 0");
}

double LensConfiguration::d_eff() const { return d_lens * (d_source - d_lens) / d_source; }

double einstein_radius(double mass, double d_lens, double d_source,
                       const PhysicalConstants& constants) {
    if (!(d_lens > 0.0) || !(d_source > d_lens))
        throw std::domain_error("lens distances must satisfy 0 < d_lens < d_source");
    return einstein_radius_deff(mass, d_lens * (d_source - d_lens) / d_source, constants);
}

double einstein_radius_deff(double mass, double d_eff, const PhysicalConstants& constants) {
    if (!(mass > 0.0)) throw std::domain_error("lens mass must be positive");
    if (!(d_eff >= 0.0)) throw std::domain_error("effective distance must be >= 0");
    return std::sqrt(4.0 * constants.G * mass / (constants.c * constants.c) * d_eff);
}

SourceOffset source_offset_from_rho(double rho_s, double einstein_radius) {
    if (rho_s < 0.0) throw std::domain_error("source offset must be >= 0");
    return {rho_s, rho_s / einstein_radius};
}

SourceOffset source_offset_from_u(double u, double einstein_radius) {
    if (u < 0.0) throw std::domain_error("source offset must be >= 0");
    return {u * einstein_radius, u};
}

double magnetic_lens_coefficient(const LensConfiguration& config, double spin_phase) {
    const NeutronStar& star = config.lens;
    const Vec3 axis = rotate_about_axis(star.dipole_axis, star.spin_axis, spin_phase);
    const double factor = dipole_orientation_factor(axis, config.projection);
    const double b0 = star.surface_field;
    return 5.0 * kPi * config.a_coupling * b0 * b0 * pow6(star.radius) * factor;
}

double reduced_deflection(const LensConfiguration& config, double image_impact,
                          double spin_phase, const PhysicalConstants& constants) {
    config.validate();
    const double abs_impact = std::abs(image_impact);
    if (abs_impact < config.lens.radius)
        throw std::domain_error("image impact inside the star (absorbed)");
    LensEquation eq;
    eq.r_g = 4.0 * constants.G * config.lens.mass / (constants.c * constants.c);
    eq.d_eff = config.d_eff();
    eq.k_mag = magnetic_lens_coefficient(config, spin_phase);
    const double beta = eq.beta(abs_impact);
    return image_impact >= 0.0 ? beta : -beta;
}

std::vector<ImageSolution> solve_images_deff(double mass, double star_radius, double d_eff,
                                             double k_mag, double rho_s,
                                             const PhysicalConstants& constants) {
    if (rho_s < 0.0) throw std::domain_error("source offset must be >= 0");

    LensEquation eq;
    eq.r_g = 4.0 * constants.G * mass / (constants.c * constants.c);
    eq.d_eff = d_eff;
    eq.k_mag = k_mag;

    const double r_e = einstein_radius_deff(mass, d_eff, constants);
    const double rho_lo = star_radius;
    const double rho_hi = 1e3 * std::max({r_e, rho_s, rho_lo});

    std::vector<ImageSolution> images;
    if (rho_s == 0.0) {
        // Perfect alignment: the Einstein ring, formally infinite magnification.
        for (double rho : roots_on_positive_side(eq, rho_lo, rho_hi, 0.0)) {
            images.push_back({rho, std::numeric_limits<double>::infinity(), +1});
        }
        return images;
    }

    // Images on the source side (impact > 0) and the far side (impact < 0).
    for (double rho : roots_on_positive_side(eq, rho_lo, rho_hi, rho_s)) {
        images.push_back({rho, eq.magnification(rho, rho_s), eq.parity(rho, rho_s)});
    }
    for (double rho : roots_on_positive_side(eq, rho_lo, rho_hi, -rho_s)) {
        images.push_back({-rho, eq.magnification(-rho, rho_s), eq.parity(-rho, rho_s)});
    }
    std::sort(images.begin(), images.end(), [](const ImageSolution& a, const ImageSolution& b) {
        return a.magnification > b.magnification;
    });
    return images;
}

std::vector<ImageSolution> solve_images(const LensConfiguration& config,
                                        const SourceOffset& source, double spin_phase,
                                        const PhysicalConstants& constants) {
    config.validate();
    return solve_images_deff(config.lens.mass, config.lens.radius, config.d_eff(),
                             magnetic_lens_coefficient(config, spin_phase), source.rho_s,
                             constants);
}

double point_lens_magnification(double u) {
    if (!(u > 0.0))
        throw std::domain_error("point-lens magnification diverges at u = 0");
    return (u * u + 2.0) / (u * std::sqrt(u * u + 4.0));
}

double total_magnification(const std::vector<ImageSolution>& images) {
    double sum = 0.0;
    for (const ImageSolution& image : images) sum += std::abs(image.magnification);
    return sum;
}

double field_threshold_for_effect(const LensConfiguration& config, double target_fraction,
                                  const PhysicalConstants& constants) {
    config.validate();
    if (!(target_fraction > 0.0) || !(target_fraction < 1.0))
        throw std::domain_error("target fraction must lie in (0, 1)");

    const double r_e = einstein_radius_deff(config.lens.mass, config.d_eff(), constants);
    if (!(r_e > config.lens.radius))
        throw std::runtime_error("Einstein radius inside the star; threshold undefined");
    const double theta_g = grav_deflection(config.lens.mass, r_e, constants);

    auto ratio = [&](double b0) {
        return magnetic_deflection(config.a_coupling, b0, config.lens.radius, r_e) / theta_g;
    };

    // Monotone in B0; bisect on log10(B0) over a generous bracket.
    double lo = -10.0, hi = 45.0;
    if (ratio(std::pow(10.0, lo)) > target_fraction || ratio(std::pow(10.0, hi)) < target_fraction)
        throw std::runtime_error("threshold bracket failure: target fraction not reachable "
                                 "within [1e-10, 1e45] T");
    for (int i = 0; i < 200 && (hi - lo) > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(std::pow(10.0, mid)) < target_fraction ? lo : hi) = mid;
    }
    return std::pow(10.0, 0.5 * (lo + hi));
}

}  // namespace qvlens
