#ifndef QVLENS_RAY_HPP
#define QVLENS_RAY_HPP

#include <cstddef>
#include <vector>

#include "qvlens/constants.hpp"
#include "qvlens/star.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

struct RayState {
    Vec3 position;                     // m
    Vec3 direction = {0.0, 0.0, 1.0};  // unit
    double path_length = 0.0;          // m
};

enum class IntegratorMethod {
    rk4_fixed,
    rk45_adaptive,
};

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk45_adaptive;
    double step = 1e3;          // m, fixed-step size for rk4_fixed
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_steps = 2'000'000;
    double domain_halfspan_factor = 200.0;  // integrate over |z| <= factor * rho

    bool operator==(const IntegratorConfig&) const = default;

    void validate() const;
};

struct Trajectory {
    std::vector<RayState> samples;
    Vec3 initial_direction;
    Vec3 final_direction;
    bool absorbed = false;   // ray entered the star
    bool truncated = false;  // max_steps exhausted before leaving the domain
};

struct DeflectionRecord {
    double rho = 0.0;         // m
    double theta_grav = 0.0;  // rad
    double theta_mag = 0.0;   // rad
    double theta_total = 0.0; // rad
    double spin_phase = 0.0;  // rad
};

/// Analytic gradient of the vacuum index at a point outside the star, for a
/// fixed propagation direction k_hat. Throws if the point is inside the star.
Vec3 index_gradient(const NeutronStar& star, const IndexModel& model, const Vec3& point,
                    const Vec3& k_hat, const PhysicalConstants& constants,
                    double spin_phase = 0.0);

/// Central-difference gradient of vacuum_index; verification fallback for the
/// analytic expression.
Vec3 index_gradient_fd(const NeutronStar& star, const IndexModel& model, const Vec3& point,
                       const Vec3& k_hat, const PhysicalConstants& constants, double step,
                       double spin_phase = 0.0);

/// Integrates the ray equation d/ds(n dr/ds) = grad n through the star's
/// index field. The star sits at the origin. Terminates once the coordinate
/// along the initial direction exceeds the domain halfspan, when the ray
/// enters the star (absorbed), or when max_steps is exhausted (truncated).
Trajectory trace_ray(const RayState& initial, const NeutronStar& star, const IndexModel& model,
                     const IntegratorConfig& cfg, const PhysicalConstants& constants,
                     double spin_phase = 0.0);

/// Angle between the initial and final directions, in [0, pi]. Throws on an
/// absorbed trajectory. Stable for deflections far below 1e-8 rad.
double deflection_from_trajectory(const Trajectory& traj);

/// Born-approximation oracle: norm of the transverse index gradient
/// integrated along the undeflected straight path at impact parameter rho,
/// by adaptive quadrature. Independent of the ODE integration path.
double straight_path_deflection(const NeutronStar& star, const IndexModel& model, double rho,
                                const PhysicalConstants& constants, double quad_rel_tol = 1e-9,
                                double spin_phase = 0.0);

/// Ray-traced magnetic deflection plus analytic gravitational deflection on a
/// logarithmic grid of impact parameters.
std::vector<DeflectionRecord> deflection_sweep(const NeutronStar& star, const IndexModel& model,
                                               double rho_min, double rho_max,
                                               std::size_t n_samples, double spin_phase,
                                               const IntegratorConfig& cfg,
                                               const PhysicalConstants& constants);

struct ModulationSample {
    double phase = 0.0;      // rad
    double theta_mag = 0.0;  // rad
};

/// Magnetic deflection at fixed rho as the dipole axis is rotated about the
/// spin axis through n_phases points covering [0, 2pi).
std::vector<ModulationSample> modulation_sweep(const NeutronStar& star, const IndexModel& model,
                                               double rho, std::size_t n_phases,
                                               const IntegratorConfig& cfg,
                                               const PhysicalConstants& constants);

}  // namespace qvlens

#endif
