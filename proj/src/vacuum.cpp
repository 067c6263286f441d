#include "qvlens/vacuum.hpp"

#include <cmath>
#include <stdexcept>

namespace qvlens {

double vacuum_index(const Vec3& B, const Vec3& k_hat, const IndexModel& model,
                    const PhysicalConstants& constants) {
    double p;
    if (model.projection == FieldProjection::total_b_squared) {
        p = B.norm2();
    } else {
        const Vec3 b_perp = B - k_hat * dot(B, k_hat);
        p = b_perp.norm2();
    }
    return 1.0 + constants.coupling_for(model.polarization) * p;
}

double grav_deflection(double mass, double rho, const PhysicalConstants& constants) {
    if (!(rho > 0.0)) throw std::domain_error("impact parameter must be positive");
    if (mass < 0.0) throw std::domain_error("mass must be >= 0");
    return 4.0 * constants.G * mass / (rho * constants.c * constants.c);
}

double magnetic_deflection(double a, double b0, double rho0, double rho) {
    if (!(rho0 > 0.0)) throw std::domain_error("star radius must be positive");
    if (rho < rho0) throw std::domain_error("ray inside the star: rho < rho0");
    const double x = rho0 / rho;
    const double x6 = x * x * x * x * x * x;
    return 5.0 * kPi * a * b0 * b0 * x6;
}

double total_deflection(const NeutronStar& star, double a, double rho,
                        const PhysicalConstants& constants) {
    return grav_deflection(star.mass, rho, constants) +
           magnetic_deflection(a, star.surface_field, star.radius, rho);
}

ValidityReport check_subcritical(double b_max, const PhysicalConstants& constants) {
    if (b_max < 0.0) throw std::domain_error("field magnitude must be >= 0");
    ValidityReport report;
    report.b_max = b_max;
    report.b_crit = constants.b_crit;
    report.subcritical = b_max < constants.b_crit;
    report.message = report.subcritical
                         ? "field below the critical value; quadratic index law applies"
                         : "field at or above the critical value; quadratic index law "
                           "unreliable, results flagged";
    return report;
}

double BornDeflection::magnitude() const { return std::hypot(dx, dy); }

BornDeflection born_deflection(double a, double moment, const Vec3& axis_ray_frame,
                               double rho, FieldProjection projection) {
    if (!(rho > 0.0)) throw std::domain_error("impact parameter must be positive");
    const Vec3 u = axis_ray_frame;
    const double c_moment = kMu0Over4Pi * moment;
    const double scale = a * c_moment * c_moment / std::pow(rho, 6);

    BornDeflection d;
    if (projection == FieldProjection::transverse_b_squared) {
        d.dx = -(15.0 * kPi / 128.0) * (41.0 * u.x * u.x + 16.0 * u.y * u.y + 15.0 * u.z * u.z);
        d.dy = (75.0 * kPi / 64.0) * u.x * u.y;
    } else {
        d.dx = -(15.0 * kPi / 16.0) * (7.0 * u.x * u.x + 2.0 * u.y * u.y + 3.0 * u.z * u.z);
        d.dy = (15.0 * kPi / 8.0) * u.x * u.y;
    }
    d.dx *= scale;
    d.dy *= scale;
    return d;
}

double dipole_orientation_factor(const Vec3& axis_ray_frame, FieldProjection projection) {
    // Unit moment and rho drop out of the ratio.
    const BornDeflection value = born_deflection(1.0, 1.0 / kMu0Over4Pi, axis_ray_frame, 1.0,
                                                 projection);
    const BornDeflection aligned = born_deflection(1.0, 1.0 / kMu0Over4Pi, {0.0, 0.0, 1.0}, 1.0,
                                                   projection);
    return value.magnitude() / aligned.magnitude();
}

}  // namespace qvlens
