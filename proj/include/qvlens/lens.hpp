#ifndef QVLENS_LENS_HPP
#define QVLENS_LENS_HPP

#include <vector>

#include "qvlens/constants.hpp"
#include "qvlens/star.hpp"

namespace qvlens {

/// Point-lens configuration: observer -> lens distance d_lens, observer ->
/// source distance d_source, with the lensing star providing mass, radius,
/// surface field, and orientation. The working frame is the ray frame of
/// born_deflection: propagation along +z, impact direction +x.
struct LensConfiguration {
    NeutronStar lens;
    double d_lens = 0.0;    // m
    double d_source = 0.0;  // m
    double a_coupling = 0.0;  // T^-2
    FieldProjection projection = FieldProjection::transverse_b_squared;

    void validate() const;

    /// d_lens (d_source - d_lens) / d_source, the effective lensing distance.
    double d_eff() const;
};

/// Linear Einstein ring radius sqrt(4GM/c^2 * d_eff).
double einstein_radius(double mass, double d_lens, double d_source,
                       const PhysicalConstants& constants);

/// Einstein radius from an effective distance directly.
double einstein_radius_deff(double mass, double d_eff, const PhysicalConstants& constants);

struct SourceOffset {
    double rho_s = 0.0;  // m, transverse distance from lens to the line of sight
    double u = 0.0;      // rho_s / R_E
};

SourceOffset source_offset_from_rho(double rho_s, double einstein_radius);
SourceOffset source_offset_from_u(double u, double einstein_radius);

struct ImageSolution {
    double image_impact = 0.0;   // m, signed impact parameter in the lens plane
    double magnification = 0.0;  // absolute magnification of this image
    int parity = +1;
};

/// Magnetic coefficient K such that the magnetic bending at impact rho is
/// K / rho^6, evaluated for the lens orientation at the given spin phase.
/// The closed-form coefficient is scaled by the dipole orientation factor.
double magnetic_lens_coefficient(const LensConfiguration& config, double spin_phase);

/// Source-plane offset reached by a ray crossing the lens plane at the given
/// signed impact parameter: beta = rho - d_eff * theta(|rho|).
double reduced_deflection(const LensConfiguration& config, double image_impact,
                          double spin_phase, const PhysicalConstants& constants);

/// All real images of the axisymmetric lens equation for the given source
/// offset, found by bracketed bisection on a log-spaced probe grid. Images
/// with impact inside the star are absorbed and not reported. Returns images
/// sorted by descending magnification; empty when no image exists.
std::vector<ImageSolution> solve_images(const LensConfiguration& config,
                                        const SourceOffset& source, double spin_phase,
                                        const PhysicalConstants& constants);

/// Low-level image solver on an explicit effective distance: lens mass and
/// radius, magnetic coefficient k_mag (bending K / rho^6), source offset in
/// meters. The binary path uses this directly with d_eff equal to the
/// line-of-sight separation.
std::vector<ImageSolution> solve_images_deff(double mass, double star_radius, double d_eff,
                                             double k_mag, double rho_s,
                                             const PhysicalConstants& constants);

/// Closed-form total point-lens magnification (u^2 + 2) / (u sqrt(u^2 + 4)).
/// Throws at u <= 0 (the ring divergence).
double point_lens_magnification(double u);

/// Sum of absolute image magnifications.
double total_magnification(const std::vector<ImageSolution>& images);

/// Smallest surface field for which the magnetic bending at rho = R_E reaches
/// target_fraction of the gravitational bending there, found by bisection.
double field_threshold_for_effect(const LensConfiguration& config, double target_fraction,
                                  const PhysicalConstants& constants);

}  // namespace qvlens

#endif
