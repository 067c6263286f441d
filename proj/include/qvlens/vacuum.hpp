#ifndef QVLENS_VACUUM_HPP
#define QVLENS_VACUUM_HPP

#include <string>

#include "qvlens/constants.hpp"
#include "qvlens/star.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

/// Refractive index of the magnetized vacuum, n = 1 + a P, where a is the
/// coupling selected by the model's polarization and P is |B|^2 or the
/// squared component of B transverse to the propagation direction k_hat.
double vacuum_index(const Vec3& B, const Vec3& k_hat, const IndexModel& model,
                    const PhysicalConstants& constants);

/// Gravitational bending angle 4GM / (rho c^2) of a ray passing a point mass
/// at impact parameter rho.
double grav_deflection(double mass, double rho, const PhysicalConstants& constants);

/// Closed-form magnetic bending angle 5 pi a B0^2 rho0^6 / rho^6 for a ray
/// passing a dipole aligned with the propagation direction.
double magnetic_deflection(double a, double b0, double rho0, double rho);

/// Sum of the gravitational and closed-form magnetic bending angles.
double total_deflection(const NeutronStar& star, double a, double rho,
                        const PhysicalConstants& constants);

struct ValidityReport {
    bool subcritical = true;
    double b_max = 0.0;
    double b_crit = 0.0;
    std::string message;
};

/// Flags field strengths at or above the critical field, where the quadratic
/// index law stops being reliable. Computation proceeds either way.
ValidityReport check_subcritical(double b_max, const PhysicalConstants& constants);

// ---------------------------------------------------------------------------
// Thin-ray (Born) closed form for a dipole of arbitrary orientation.
//
// Working frame: ray travels along +z, closest approach at (rho, 0, 0), so +x
// points from the star to the ray. For a unit dipole axis u = (ux, uy, uz)
// expressed in this frame, integrating the transverse index gradient along
// the undeflected path gives deflection components
//
//   transverse projection:
//     dx = -(15 pi / 128) (41 ux^2 + 16 uy^2 + 15 uz^2) * a C^2 / rho^6
//     dy =  (75 pi / 64) ux uy                          * a C^2 / rho^6
//   total projection:
//     dx = -(15 pi / 16) (7 ux^2 + 2 uy^2 + 3 uz^2)     * a C^2 / rho^6
//     dy =  (15 pi / 8) ux uy                           * a C^2 / rho^6
//
// with C = (mu0/4pi) * moment. Negative dx bends the ray toward the star.
// ---------------------------------------------------------------------------

struct BornDeflection {
    double dx = 0.0;  // rad, along +x (away from the star)
    double dy = 0.0;  // rad, along +y

    double magnitude() const;
};

/// Closed-form Born deflection for a dipole moment (A m^2) whose unit axis is
/// given in the working frame described above.
BornDeflection born_deflection(double a, double moment, const Vec3& axis_ray_frame,
                               double rho, FieldProjection projection);

/// Deflection magnitude for a given dipole orientation divided by the value
/// for an axis aligned with the propagation direction. Dimensionless, >= 0.
double dipole_orientation_factor(const Vec3& axis_ray_frame, FieldProjection projection);

}  // namespace qvlens

#endif
