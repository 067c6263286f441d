#ifndef QVLENS_DIPOLE_HPP
#define QVLENS_DIPOLE_HPP

#include "qvlens/star.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

struct MagneticDipole {
    double moment = 0.0;           // A m^2
    Vec3 axis = {0.0, 0.0, 1.0};   // unit
    Vec3 center = {0.0, 0.0, 0.0};  // m
};

/// Dipole field (mu0/4pi) [3 (m.rhat) rhat - m] / r^3 in teslas.
/// Throws if point coincides with the dipole center.
Vec3 dipole_field(const MagneticDipole& dipole, const Vec3& point);

/// Spatial Jacobian dB_i/dx_j of the dipole field (symmetric, traceless).
Mat3 dipole_field_jacobian(const MagneticDipole& dipole, const Vec3& point);

/// Dipole moment implied by a quoted surface field under a given convention.
/// closed_form maps to the equatorial normalization.
double moment_from_surface_field(double b0, double rho0, FieldConvention convention);

/// Dipole of a star placed at the origin of the working frame, with the
/// dipole axis optionally rotated about the spin axis by spin_phase.
MagneticDipole star_dipole(const NeutronStar& star, double spin_phase = 0.0);

}  // namespace qvlens

#endif
