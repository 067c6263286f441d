#ifndef QVLENS_STAR_HPP
#define QVLENS_STAR_HPP

#include <cmath>
#include <stdexcept>

#include "qvlens/constants.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

/// How the quoted surface field B0 maps onto the dipole moment.
///
/// equatorial:  B0 is the field at the magnetic equator, m = B0 rho0^3 / (mu0/4pi)
/// polar:       B0 is the field at the magnetic pole, half the equatorial moment
/// closed_form: B0 enters the closed-form deflection law verbatim; the dipole
///              normalization used for ray tracing follows the equatorial rule
enum class FieldConvention {
    equatorial,
    polar,
    closed_form,
};

/// Which field magnitude drives the index perturbation.
enum class FieldProjection {
    total_b_squared,       // n - 1 proportional to |B|^2
    transverse_b_squared,  // n - 1 proportional to |B - (B.k)k|^2
};

/// Vacuum index model: which coupling and which projection of B.
struct IndexModel {
    Polarization polarization = Polarization::perpendicular;
    FieldProjection projection = FieldProjection::transverse_b_squared;

    bool operator==(const IndexModel&) const = default;
};

struct NeutronStar {
    double mass = 0.0;           // kg
    double radius = 0.0;         // m
    double surface_field = 0.0;  // T
    FieldConvention field_convention = FieldConvention::closed_form;
    Vec3 dipole_axis = {0.0, 0.0, 1.0};  // unit
    Vec3 spin_axis = {0.0, 0.0, 1.0};    // unit
    double spin_period = 1.0;            // s
    double spin_phase0 = 0.0;            // rad

    bool operator==(const NeutronStar&) const = default;

    void validate() const {
        if (!(mass > 0.0)) throw std::domain_error("star mass must be positive");
        if (!(radius > 0.0)) throw std::domain_error("star radius must be positive");
        if (!(surface_field >= 0.0)) throw std::domain_error("surface field must be >= 0");
        if (!(spin_period > 0.0)) throw std::domain_error("spin period must be positive");
        if (std::abs(dipole_axis.norm() - 1.0) > 1e-12)
            throw std::domain_error("dipole axis must be unit length");
        if (std::abs(spin_axis.norm() - 1.0) > 1e-12)
            throw std::domain_error("spin axis must be unit length");
    }
};

}  // namespace qvlens

#endif
