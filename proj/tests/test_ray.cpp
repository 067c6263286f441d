#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qvlens/constants.hpp"
#include "qvlens/dipole.hpp"
#include "qvlens/ray.hpp"
#include "qvlens/vacuum.hpp"

#include "test_util.hpp"

using namespace qvlens;
using qvtest::make_star;
using qvtest::rel_diff;

namespace {

const PhysicalConstants kConstants;
const IndexModel kTransverse{Polarization::perpendicular,
                             FieldProjection::transverse_b_squared};

RayState axial_ray(double rho, double halfspan_factor = 200.0) {
    RayState ray;
    ray.position = {rho, 0.0, -halfspan_factor * rho};
    ray.direction = {0.0, 0.0, 1.0};
    return ray;
}

double traced_deflection(const NeutronStar& star, const IndexModel& model, double rho,
                         const IntegratorConfig& cfg, double spin_phase = 0.0) {
    const Trajectory traj = trace_ray(axial_ray(rho, cfg.domain_halfspan_factor), star, model,
                                      cfg, kConstants, spin_phase);
    REQUIRE_FALSE(traj.absorbed);
    REQUIRE_FALSE(traj.truncated);
    return deflection_from_trajectory(traj);
}

}  // namespace

TEST_CASE("index gradient") {
    SUBCASE("zero field gives the zero vector") {
        const NeutronStar star = make_star(0.0);
        const Vec3 g = index_gradient(star, kTransverse, {5e4, 0, 3e4}, {0, 0, 1}, kConstants);
        CHECK(g.x == 0.0);
        CHECK(g.y == 0.0);
        CHECK(g.z == 0.0);
    }
    SUBCASE("points toward the star on the transverse axis (total projection)") {
        const NeutronStar star = make_star(1e9);
        const IndexModel total{Polarization::perpendicular, FieldProjection::total_b_squared};
        const Vec3 g = index_gradient(star, total, {5e4, 0, 0}, {0, 0, 1}, kConstants);
        CHECK(g.x < 0.0);
    }
    SUBCASE("analytic matches central differences at 100 random exterior points") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> log_r(std::log(2e4), std::log(2e5));
        NeutronStar star = make_star(1e8);
        for (int i = 0; i < 100; ++i) {
            star.dipole_axis = qvtest::random_unit(rng);
            const Vec3 point = qvtest::random_unit(rng) * std::exp(log_r(rng));
            const Vec3 k_hat = qvtest::random_unit(rng);
            for (const IndexModel model :
                 {kTransverse,
                  IndexModel{Polarization::parallel, FieldProjection::total_b_squared}}) {
                const Vec3 analytic = index_gradient(star, model, point, k_hat, kConstants);
                const Vec3 fd = index_gradient_fd(star, model, point, k_hat, kConstants,
                                                  1e-4 * star.radius);
                CHECK((analytic - fd).norm() <= 1e-6 * analytic.norm());
            }
        }
    }
    SUBCASE("inside the star is a domain error") {
        const NeutronStar star = make_star(1e8);
        CHECK_THROWS_AS(index_gradient(star, kTransverse, {5e3, 0, 0}, {0, 0, 1}, kConstants),
                        std::domain_error);
    }
}

TEST_CASE("deflection_from_trajectory reference angles") {
    Trajectory traj;
    traj.initial_direction = {0, 0, 1};
    traj.final_direction = {0, 0, 1};
    CHECK(deflection_from_trajectory(traj) == 0.0);
    traj.final_direction = {0, 0, -1};
    CHECK(deflection_from_trajectory(traj) == doctest::Approx(kPi).epsilon(1e-15));
    traj.final_direction = {1, 0, 0};
    CHECK(deflection_from_trajectory(traj) == doctest::Approx(kPi / 2).epsilon(1e-15));
    traj.absorbed = true;
    CHECK_THROWS_AS(deflection_from_trajectory(traj), std::domain_error);
}

TEST_CASE("zero field propagates straight") {
    const NeutronStar star = make_star(0.0);
    IntegratorConfig cfg;
    const double rho = 5e4;
    const Trajectory traj = trace_ray(axial_ray(rho), star, kTransverse, cfg, kConstants);
    CHECK(deflection_from_trajectory(traj) < 1e-12);
    for (const RayState& s : traj.samples) {
        CHECK(std::abs(s.position.x - rho) < 1e-9 * rho);
        CHECK(std::abs(s.position.y) < 1e-9 * rho);
    }
}

TEST_CASE("direction stays unit at every accepted step") {
    const NeutronStar star = make_star(1e11);
    IntegratorConfig cfg;
    const Trajectory traj = trace_ray(axial_ray(3e4), star, kTransverse, cfg, kConstants);
    for (const RayState& s : traj.samples) {
        CHECK(std::abs(s.direction.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("tracer agrees with the straight-path oracle") {
    const NeutronStar star = make_star(1e9);
    IntegratorConfig cfg;

    SUBCASE("0.5% at rho = 5 rho0, aligned dipole") {
        const double rho = 5e4;
        const double traced = traced_deflection(star, kTransverse, rho, cfg);
        const double oracle = straight_path_deflection(star, kTransverse, rho, kConstants);
        CHECK(rel_diff(traced, oracle) < 5e-3);
    }
    SUBCASE("0.5% for rho >= 3 rho0 across orientations") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 4; ++i) {
            NeutronStar tilted = star;
            tilted.dipole_axis = qvtest::random_unit(rng);
            for (const double rho : {3e4, 1e5}) {
                const double traced = traced_deflection(tilted, kTransverse, rho, cfg);
                const double oracle =
                    straight_path_deflection(tilted, kTransverse, rho, kConstants);
                CHECK(rel_diff(traced, oracle) < 5e-3);
            }
        }
    }
    SUBCASE("rho^-6 scaling of the traced deflection") {
        const double t1 = traced_deflection(star, kTransverse, 4e4, cfg);
        const double t2 = traced_deflection(star, kTransverse, 8e4, cfg);
        CHECK(rel_diff(t1 / t2, 64.0) < 1e-2);
    }
}

TEST_CASE("fixed-step convergence: halving the step moves the answer < 0.1%") {
    const NeutronStar star = make_star(1e9);
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::rk4_fixed;
    const double rho = 5e4;
    cfg.step = rho / 16.0;
    const double coarse = traced_deflection(star, kTransverse, rho, cfg);
    cfg.step = rho / 32.0;
    const double fine = traced_deflection(star, kTransverse, rho, cfg);
    CHECK(rel_diff(coarse, fine) < 1e-3);
}

TEST_CASE("absorbed rays are flagged") {
    NeutronStar star = make_star(1e11);
    IntegratorConfig cfg;
    // Graze the surface: strong field at rho0 bends by ~0.5 rad, into the star.
    RayState ray = axial_ray(1.0005e4);
    const Trajectory traj = trace_ray(ray, star, kTransverse, cfg, kConstants);
    CHECK(traj.absorbed);
    CHECK_THROWS_AS(deflection_from_trajectory(traj), std::domain_error);
}

TEST_CASE("exhausting max_steps marks the trajectory truncated") {
    const NeutronStar star = make_star(1e9);
    IntegratorConfig cfg;
    cfg.max_steps = 10;
    const Trajectory traj = trace_ray(axial_ray(5e4), star, kTransverse, cfg, kConstants);
    CHECK(traj.truncated);
    CHECK(traj.samples.size() == 11);  // initial state plus max_steps
}

TEST_CASE("integrator config validation") {
    IntegratorConfig cfg;
    cfg.domain_halfspan_factor = 20.0;  // below the minimum of 50
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
    cfg = {};
    cfg.step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
    cfg = {};
    cfg.max_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_CASE("straight-path oracle properties") {
    SUBCASE("zero field gives zero") {
        const NeutronStar star = make_star(0.0);
        CHECK(straight_path_deflection(star, kTransverse, 5e4, kConstants) == 0.0);
    }
    SUBCASE("deflection scales as B0^2") {
        const NeutronStar s1 = make_star(5e8);
        const NeutronStar s2 = make_star(1e9);
        const double t1 = straight_path_deflection(s1, kTransverse, 5e4, kConstants);
        const double t2 = straight_path_deflection(s2, kTransverse, 5e4, kConstants);
        CHECK(rel_diff(t2 / t1, 4.0) < 1e-10);
    }
    SUBCASE("aligned equatorial prefactor is constant in rho and equals 225 pi/128") {
        const NeutronStar star = make_star(1e9);
        const double a = kConstants.a_perp;
        std::vector<double> prefactors;
        for (const double rho : {3e4, 1e5, 3e5}) {
            const double theta = straight_path_deflection(star, kTransverse, rho, kConstants);
            prefactors.push_back(theta * std::pow(rho / star.radius, 6) /
                                 (a * star.surface_field * star.surface_field));
        }
        for (const double p : prefactors) {
            CHECK(rel_diff(p, prefactors.front()) < 1e-3);
            CHECK(rel_diff(p, 225.0 * kPi / 128.0) < 1e-6);
        }
    }
    SUBCASE("agrees with the closed form for random orientations and both projections") {
        std::mt19937_64 rng(17);
        NeutronStar star = make_star(1e9);
        const double moment = moment_from_surface_field(star.surface_field, star.radius,
                                                        star.field_convention);
        for (int i = 0; i < 6; ++i) {
            star.dipole_axis = qvtest::random_unit(rng);
            for (const FieldProjection proj :
                 {FieldProjection::transverse_b_squared, FieldProjection::total_b_squared}) {
                const IndexModel model{Polarization::perpendicular, proj};
                const double oracle =
                    straight_path_deflection(star, model, 7e4, kConstants, 1e-10);
                const double closed =
                    born_deflection(kConstants.a_perp, moment, star.dipole_axis, 7e4, proj)
                        .magnitude();
                CHECK(rel_diff(oracle, closed) < 1e-7);
            }
        }
    }
}

TEST_CASE("deflection sweep") {
    const NeutronStar star = make_star(1e9);
    IntegratorConfig cfg;

    SUBCASE("log-log slope of theta_mag is -6 within 0.05, theta_grav slope is -1") {
        const auto records =
            deflection_sweep(star, kTransverse, 2e4, 5e5, 12, 0.0, cfg, kConstants);
        std::vector<double> lx, ly_mag, ly_grav;
        for (const auto& rec : records) {
            lx.push_back(std::log(rec.rho));
            ly_mag.push_back(std::log(rec.theta_mag));
            ly_grav.push_back(std::log(rec.theta_grav));
            CHECK(rec.theta_total == rec.theta_grav + rec.theta_mag);
        }
        CHECK(std::abs(qvtest::fit_slope(lx, ly_mag) + 6.0) < 0.05);
        CHECK(std::abs(qvtest::fit_slope(lx, ly_grav) + 1.0) < 1e-12);
    }
    SUBCASE("two dipole orientations: distinct curves, identical slope") {
        NeutronStar tilted = star;
        tilted.dipole_axis = {1.0, 0.0, 0.0};
        const auto aligned =
            deflection_sweep(star, kTransverse, 2e4, 2e5, 8, 0.0, cfg, kConstants);
        const auto perp =
            deflection_sweep(tilted, kTransverse, 2e4, 2e5, 8, 0.0, cfg, kConstants);
        std::vector<double> lx, la, lp;
        for (std::size_t i = 0; i < aligned.size(); ++i) {
            CHECK(perp[i].theta_mag > 1.5 * aligned[i].theta_mag);
            lx.push_back(std::log(aligned[i].rho));
            la.push_back(std::log(aligned[i].theta_mag));
            lp.push_back(std::log(perp[i].theta_mag));
        }
        CHECK(std::abs(qvtest::fit_slope(lx, la) - qvtest::fit_slope(lx, lp)) < 0.02);
    }
    SUBCASE("bad grids are rejected") {
        CHECK_THROWS_AS(deflection_sweep(star, kTransverse, 5e3, 1e5, 8, 0.0, cfg, kConstants),
                        std::domain_error);
        CHECK_THROWS_AS(deflection_sweep(star, kTransverse, 1e5, 1e4, 8, 0.0, cfg, kConstants),
                        std::domain_error);
        CHECK_THROWS_AS(deflection_sweep(star, kTransverse, 2e4, 1e5, 1, 0.0, cfg, kConstants),
                        std::domain_error);
    }
}

TEST_CASE("modulation sweep") {
    IntegratorConfig cfg;

    SUBCASE("phase-pi symmetry for several tilts and radii") {
        // The traced deflection carries a genuine O(theta^2) launch-geometry
        // term that is odd under the half-turn, so the 1e-9 relative symmetry
        // holds in the small-deflection regime (theta below ~5e-9 rad here).
        for (const double tilt : {0.4, 1.0, kPi / 2}) {
            const NeutronStar star =
                make_star(1e9, {std::sin(tilt), 0.0, std::cos(tilt)}, {0, 0, 1});
            for (const double rho : {6e4, 1.2e5}) {
                const auto samples = modulation_sweep(star, kTransverse, rho, 16, cfg, kConstants);
                for (std::size_t i = 0; i < 8; ++i) {
                    CHECK(rel_diff(samples[i].theta_mag, samples[i + 8].theta_mag) < 1e-9);
                }
            }
        }
    }
    SUBCASE("phase-pi symmetry of the Born oracle is exact at any field") {
        for (const double tilt : {0.4, 1.0}) {
            const NeutronStar star =
                make_star(1e9, {std::sin(tilt), 0.0, std::cos(tilt)}, {0, 0, 1});
            for (std::size_t i = 0; i < 8; ++i) {
                const double phase = 2.0 * kPi * static_cast<double>(i) / 16.0;
                const double a = straight_path_deflection(star, kTransverse, 3e4, kConstants,
                                                          1e-11, phase);
                const double b = straight_path_deflection(star, kTransverse, 3e4, kConstants,
                                                          1e-11, phase + kPi);
                CHECK(rel_diff(a, b) < 1e-10);
            }
        }
    }
    SUBCASE("aligned spin and dipole axes give a constant curve") {
        const NeutronStar star = make_star(1e9, {0, 0, 1}, {0, 0, 1});
        const auto samples = modulation_sweep(star, kTransverse, 5e4, 8, cfg, kConstants);
        for (const auto& s : samples) {
            CHECK(rel_diff(s.theta_mag, samples.front().theta_mag) < 1e-9);
        }
    }
    SUBCASE("orthogonal rotator depth approaches 1/3 for the total projection") {
        // Spin along the impact axis, dipole sweeping the transverse plane.
        const NeutronStar star = make_star(1e9, {0, 0, 1}, {1, 0, 0});
        const IndexModel total{Polarization::perpendicular, FieldProjection::total_b_squared};
        const auto samples = modulation_sweep(star, total, 5e4, 32, cfg, kConstants);
        double lo = samples.front().theta_mag, hi = lo;
        for (const auto& s : samples) {
            lo = std::min(lo, s.theta_mag);
            hi = std::max(hi, s.theta_mag);
        }
        CHECK(rel_diff((hi - lo) / hi, 1.0 / 3.0) < 1e-2);
    }
    SUBCASE("needs at least 8 phases") {
        const NeutronStar star = make_star(1e9);
        CHECK_THROWS_AS(modulation_sweep(star, kTransverse, 5e4, 4, cfg, kConstants),
                        std::domain_error);
    }
}
