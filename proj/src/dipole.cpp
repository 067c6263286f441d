#include "qvlens/dipole.hpp"

#include <cmath>
#include <stdexcept>

#include "qvlens/constants.hpp"

namespace qvlens {

Vec3 dipole_field(const MagneticDipole& dipole, const Vec3& point) {
    const Vec3 r = point - dipole.center;
    const double rn = r.norm();
    if (rn == 0.0) throw std::domain_error("dipole field evaluated at the dipole center");
    const Vec3 rhat = r / rn;
    const Vec3 m = dipole.axis * dipole.moment;
    return (rhat * (3.0 * dot(m, rhat)) - m) * (kMu0Over4Pi / (rn * rn * rn));
}

Mat3 dipole_field_jacobian(const MagneticDipole& dipole, const Vec3& point) {
    const Vec3 r = point - dipole.center;
    const double rn = r.norm();
    if (rn == 0.0) throw std::domain_error("dipole Jacobian evaluated at the dipole center");
    const Vec3 m = dipole.axis * dipole.moment;
    const double mr = dot(m, r);
    const double c = 3.0 * kMu0Over4Pi / std::pow(rn, 5);
    const double q = 5.0 * mr / (rn * rn);

    // dB_i/dx_j = c [ m_j r_i + (m.r) delta_ij + m_i r_j - 5 (m.r) r_i r_j / r^2 ]
    auto entry = [&](double ri, double rj, double mi, double mj, double delta) {
        return c * (mj * ri + mr * delta + mi * rj - q * ri * rj);
    };
    Mat3 jac;
    jac.row0 = {entry(r.x, r.x, m.x, m.x, 1.0), entry(r.x, r.y, m.x, m.y, 0.0),
                entry(r.x, r.z, m.x, m.z, 0.0)};
    jac.row1 = {entry(r.y, r.x, m.y, m.x, 0.0), entry(r.y, r.y, m.y, m.y, 1.0),
                entry(r.y, r.z, m.y, m.z, 0.0)};
    jac.row2 = {entry(r.z, r.x, m.z, m.x, 0.0), entry(r.z, r.y, m.z, m.y, 0.0),
                entry(r.z, r.z, m.z, m.z, 1.0)};
    return jac;
}

double moment_from_surface_field(double b0, double rho0, FieldConvention convention) {
    if (b0 < 0.0) throw std::domain_error("surface field must be >= 0");
    if (!(rho0 > 0.0)) throw std::domain_error("star radius must be positive");
    const double equatorial = b0 * rho0 * rho0 * rho0 / kMu0Over4Pi;
    switch (convention) {
        case FieldConvention::equatorial: return equatorial;
        case FieldConvention::closed_form: return equatorial;
        case FieldConvention::polar: return 0.5 * equatorial;
    }
    throw std::logic_error("invalid field convention");
}

MagneticDipole star_dipole(const NeutronStar& star, double spin_phase) {
    MagneticDipole dipole;
    dipole.moment = moment_from_surface_field(star.surface_field, star.radius,
                                              star.field_convention);
    dipole.axis = spin_phase == 0.0
                      ? star.dipole_axis
                      : rotate_about_axis(star.dipole_axis, star.spin_axis, spin_phase);
    dipole.center = {0.0, 0.0, 0.0};
    return dipole;
}

}  // namespace qvlens
