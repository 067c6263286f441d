#include "qvlens/ray.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qvlens/dipole.hpp"
#include "qvlens/vacuum.hpp"

namespace qvlens {

namespace {

// Gradient of n - 1 = a * P(r) with P = |B|^2 or |B_perp|^2 at fixed k_hat.
// With J the (symmetric) field Jacobian, grad P = 2 J B or 2 J B_perp.
Vec3 gradient_for_dipole(const MagneticDipole& dipole, double a, FieldProjection projection,
                         const Vec3& point, const Vec3& k_hat) {
    const Vec3 b = dipole_field(dipole, point);
    const Mat3 jac = dipole_field_jacobian(dipole, point);
    const Vec3 b_eff = projection == FieldProjection::total_b_squared
                           ? b
                           : b - k_hat * dot(b, k_hat);
    return jac.apply(b_eff) * (2.0 * a);
}

struct TraceContext {
    MagneticDipole dipole;
    double coupling = 0.0;
    FieldProjection projection = FieldProjection::transverse_b_squared;
    double star_radius = 0.0;
};

// Ray equation d/ds(n dr/ds) = grad n, with t = dr/ds kept unit:
//   dr/ds = t
//   dt/ds = (grad n - (grad n . t) t) / n
void derivatives(const TraceContext& ctx, const Vec3& pos, const Vec3& dir, Vec3& dpos,
                 Vec3& ddir) {
    const Vec3 grad = gradient_for_dipole(ctx.dipole, ctx.coupling, ctx.projection, pos, dir);
    const Vec3 b = dipole_field(ctx.dipole, pos);
    const Vec3 b_eff = ctx.projection == FieldProjection::total_b_squared
                           ? b
                           : b - dir * dot(b, dir);
    const double n = 1.0 + ctx.coupling * b_eff.norm2();
    dpos = dir;
    ddir = (grad - dir * dot(grad, dir)) / n;
}

struct Increment {
    Vec3 dpos;
    Vec3 ddir;
};

Increment rk4_step(const TraceContext& ctx, const Vec3& pos, const Vec3& dir, double h) {
    Vec3 kp1, kd1, kp2, kd2, kp3, kd3, kp4, kd4;
    derivatives(ctx, pos, dir, kp1, kd1);
    derivatives(ctx, pos + kp1 * (0.5 * h), dir + kd1 * (0.5 * h), kp2, kd2);
    derivatives(ctx, pos + kp2 * (0.5 * h), dir + kd2 * (0.5 * h), kp3, kd3);
    derivatives(ctx, pos + kp3 * h, dir + kd3 * h, kp4, kd4);
    Increment inc;
    inc.dpos = (kp1 + (kp2 + kp3) * 2.0 + kp4) * (h / 6.0);
    inc.ddir = (kd1 + (kd2 + kd3) * 2.0 + kd4) * (h / 6.0);
    return inc;
}

// Dormand-Prince 5(4) embedded pair.
struct Rk45Result {
    Increment fifth;
    Vec3 err_pos;
    Vec3 err_dir;
};

Rk45Result rk45_step(const TraceContext& ctx, const Vec3& pos, const Vec3& dir, double h) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0, e4 = 393.0 / 640.0,
                            e5 = -92097.0 / 339200.0, e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;

    Vec3 kp[7], kd[7];
    derivatives(ctx, pos, dir, kp[0], kd[0]);
    derivatives(ctx, pos + kp[0] * (a21 * h), dir + kd[0] * (a21 * h), kp[1], kd[1]);
    derivatives(ctx, pos + (kp[0] * a31 + kp[1] * a32) * h, dir + (kd[0] * a31 + kd[1] * a32) * h,
                kp[2], kd[2]);
    derivatives(ctx, pos + (kp[0] * a41 + kp[1] * a42 + kp[2] * a43) * h,
                dir + (kd[0] * a41 + kd[1] * a42 + kd[2] * a43) * h, kp[3], kd[3]);
    derivatives(ctx, pos + (kp[0] * a51 + kp[1] * a52 + kp[2] * a53 + kp[3] * a54) * h,
                dir + (kd[0] * a51 + kd[1] * a52 + kd[2] * a53 + kd[3] * a54) * h, kp[4], kd[4]);
    derivatives(ctx,
                pos + (kp[0] * a61 + kp[1] * a62 + kp[2] * a63 + kp[3] * a64 + kp[4] * a65) * h,
                dir + (kd[0] * a61 + kd[1] * a62 + kd[2] * a63 + kd[3] * a64 + kd[4] * a65) * h,
                kp[5], kd[5]);

    const Vec3 pos5 = (kp[0] * b1 + kp[2] * b3 + kp[3] * b4 + kp[4] * b5 + kp[5] * b6) * h;
    const Vec3 dir5 = (kd[0] * b1 + kd[2] * b3 + kd[3] * b4 + kd[4] * b5 + kd[5] * b6) * h;
    derivatives(ctx, pos + pos5, dir + dir5, kp[6], kd[6]);

    const Vec3 pos4 = (kp[0] * e1 + kp[2] * e3 + kp[3] * e4 + kp[4] * e5 + kp[5] * e6 +
                       kp[6] * e7) * h;
    const Vec3 dir4 = (kd[0] * e1 + kd[2] * e3 + kd[3] * e4 + kd[4] * e5 + kd[5] * e6 +
                       kd[6] * e7) * h;

    Rk45Result out;
    out.fifth = {pos5, dir5};
    out.err_pos = pos5 - pos4;
    out.err_dir = dir5 - dir4;
    return out;
}

double error_norm(const Rk45Result& r, const Vec3& pos, double length_scale,
                  const IntegratorConfig& cfg) {
    auto comp = [&](double err, double y, double ref) {
        return std::abs(err) / (cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y), ref));
    };
    double norm = 0.0;
    norm = std::max(norm, comp(r.err_pos.x, pos.x, length_scale));
    norm = std::max(norm, comp(r.err_pos.y, pos.y, length_scale));
    norm = std::max(norm, comp(r.err_pos.z, pos.z, length_scale));
    norm = std::max(norm, comp(r.err_dir.x, 1.0, 1.0));
    norm = std::max(norm, comp(r.err_dir.y, 1.0, 1.0));
    norm = std::max(norm, comp(r.err_dir.z, 1.0, 1.0));
    return norm;
}

double impact_parameter(const RayState& ray) {
    const Vec3 transverse = ray.position - ray.direction * dot(ray.position, ray.direction);
    return transverse.norm();
}

// Adaptive Simpson with a fixed absolute tolerance per interval.
template <typename F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b, double fb, double m,
                            double fm, double whole, double eps, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double eps) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, eps, 48);
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(step > 0.0)) throw std::domain_error("integrator step must be positive");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::domain_error("integrator tolerances must be positive");
    if (max_steps == 0) throw std::domain_error("max_steps must be positive");
    if (!(domain_halfspan_factor >= 50.0))
        throw std::domain_error("domain halfspan factor must be >= 50");
}

Vec3 index_gradient(const NeutronStar& star, const IndexModel& model, const Vec3& point,
                    const Vec3& k_hat, const PhysicalConstants& constants, double spin_phase) {
    if (point.norm() <= star.radius)
        throw std::domain_error("index gradient requested inside the star");
    const MagneticDipole dipole = star_dipole(star, spin_phase);
    return gradient_for_dipole(dipole, constants.coupling_for(model.polarization),
                               model.projection, point, k_hat);
}

Vec3 index_gradient_fd(const NeutronStar& star, const IndexModel& model, const Vec3& point,
                       const Vec3& k_hat, const PhysicalConstants& constants, double step,
                       double spin_phase) {
    if (point.norm() <= star.radius)
        throw std::domain_error("index gradient requested inside the star");
    const MagneticDipole dipole = star_dipole(star, spin_phase);
    const double coupling = constants.coupling_for(model.polarization);
    // Difference the perturbation n - 1 directly; differencing 1 + O(1e-10)
    // values would lose everything to rounding.
    auto pert_at = [&](const Vec3& p) {
        const Vec3 b = dipole_field(dipole, p);
        const Vec3 b_eff = model.projection == FieldProjection::total_b_squared
                               ? b
                               : b - k_hat * dot(b, k_hat);
        return coupling * b_eff.norm2();
    };
    const double h = step;
    return {(pert_at({point.x + h, point.y, point.z}) -
             pert_at({point.x - h, point.y, point.z})) / (2.0 * h),
            (pert_at({point.x, point.y + h, point.z}) -
             pert_at({point.x, point.y - h, point.z})) / (2.0 * h),
            (pert_at({point.x, point.y, point.z + h}) -
             pert_at({point.x, point.y, point.z - h})) / (2.0 * h)};
}

Trajectory trace_ray(const RayState& initial, const NeutronStar& star, const IndexModel& model,
                     const IntegratorConfig& cfg, const PhysicalConstants& constants,
                     double spin_phase) {
    cfg.validate();
    star.validate();
    if (initial.position.norm() <= star.radius)
        throw std::domain_error("ray starts inside the star");
    if (std::abs(initial.direction.norm() - 1.0) > 1e-9)
        throw std::domain_error("initial direction must be unit length");

    TraceContext ctx;
    ctx.dipole = star_dipole(star, spin_phase);
    ctx.coupling = constants.coupling_for(model.polarization);
    ctx.projection = model.projection;
    ctx.star_radius = star.radius;

    const Vec3 axis = initial.direction.normalized();
    const double rho = std::max(impact_parameter(initial), star.radius * 1e-6);
    const double halfspan = cfg.domain_halfspan_factor * rho;
    // Resolution floor: the index bump lives at |z| <~ few rho, so cap the
    // step at a fraction of the local radius. Adaptivity refines further when
    // the field is strong enough to register against rel_tol.
    const auto h_cap = [&](const Vec3& at) { return std::max(at.norm(), rho) / 16.0; };

    Trajectory traj;
    traj.initial_direction = axis;
    traj.samples.push_back({initial.position, axis, 0.0});

    Vec3 pos = initial.position;
    Vec3 dir = axis;
    double path = 0.0;
    double h = cfg.method == IntegratorMethod::rk4_fixed ? cfg.step
                                                         : std::min(rho / 100.0, h_cap(pos));

    for (std::size_t step_count = 0; step_count < cfg.max_steps; ++step_count) {
        if (cfg.method == IntegratorMethod::rk4_fixed) {
            const Increment inc = rk4_step(ctx, pos, dir, h);
            pos += inc.dpos;
            dir += inc.ddir;
            path += h;
        } else {
            double attempted = std::min(h, h_cap(pos));
            for (;;) {
                const Rk45Result r = rk45_step(ctx, pos, dir, attempted);
                const double err = error_norm(r, pos, rho, cfg);
                if (err <= 1.0) {
                    pos += r.fifth.dpos;
                    dir += r.fifth.ddir;
                    path += attempted;
                    const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                    h = attempted * std::clamp(grow, 0.2, 5.0);
                    break;
                }
                attempted *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (!(attempted > halfspan * 1e-15))
                    throw std::runtime_error("ray integrator step size collapsed");
            }
        }

        dir = dir.normalized();
        traj.samples.push_back({pos, dir, path});

        if (pos.norm() < star.radius) {
            traj.absorbed = true;
            break;
        }
        if (dot(pos, axis) > halfspan) break;
        if (step_count + 1 == cfg.max_steps) traj.truncated = true;
    }

    traj.final_direction = dir;
    return traj;
}

double deflection_from_trajectory(const Trajectory& traj) {
    if (traj.absorbed)
        throw std::domain_error("deflection undefined for an absorbed trajectory");
    const Vec3& a = traj.initial_direction;
    const Vec3& b = traj.final_direction;
    // Equivalent to acos(a.b) but keeps precision for tiny angles.
    return std::atan2(cross(a, b).norm(), dot(a, b));
}

double straight_path_deflection(const NeutronStar& star, const IndexModel& model, double rho,
                                const PhysicalConstants& constants, double quad_rel_tol,
                                double spin_phase) {
    if (!(rho > star.radius))
        throw std::domain_error("impact parameter must exceed the star radius");
    const MagneticDipole dipole = star_dipole(star, spin_phase);
    const double coupling = constants.coupling_for(model.polarization);
    const Vec3 k_hat = {0.0, 0.0, 1.0};

    // Transverse gradient components along the straight path (rho, 0, z),
    // mapped to a finite interval by z = rho tan(phi).
    auto component = [&](int axis_index) {
        return [&, axis_index](double phi) {
            const double z = rho * std::tan(phi);
            const double w = rho / (std::cos(phi) * std::cos(phi));
            const Vec3 g = gradient_for_dipole(dipole, coupling, model.projection,
                                               {rho, 0.0, z}, k_hat);
            return (axis_index == 0 ? g.x : g.y) * w;
        };
    };

    const double a = -kPi / 2.0 + 1e-9;
    const double b = kPi / 2.0 - 1e-9;

    // Rough composite pass to set the absolute tolerance scale.
    auto rough = [&](auto&& f) {
        double sum = 0.0;
        const int n = 128;
        for (int i = 0; i < n; ++i) {
            const double x0 = a + (b - a) * i / n;
            const double x1 = a + (b - a) * (i + 1) / n;
            sum += (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
        }
        return sum;
    };
    const double rough_x = rough(component(0));
    const double rough_y = rough(component(1));
    const double scale = std::hypot(rough_x, rough_y);
    if (scale == 0.0) return 0.0;

    const double eps = quad_rel_tol * scale;
    const double ix = adaptive_simpson(component(0), a, b, eps);
    const double iy = adaptive_simpson(component(1), a, b, eps);
    return std::hypot(ix, iy);
}

std::vector<DeflectionRecord> deflection_sweep(const NeutronStar& star, const IndexModel& model,
                                               double rho_min, double rho_max,
                                               std::size_t n_samples, double spin_phase,
                                               const IntegratorConfig& cfg,
                                               const PhysicalConstants& constants) {
    if (!(rho_min >= star.radius)) throw std::domain_error("rho_min must be >= star radius");
    if (!(rho_min < rho_max)) throw std::domain_error("rho_min must be less than rho_max");
    if (n_samples < 2) throw std::domain_error("need at least 2 sweep samples");

    std::vector<DeflectionRecord> records;
    records.reserve(n_samples);
    const double log_ratio = std::log(rho_max / rho_min);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double rho = rho_min * std::exp(log_ratio * frac);
        RayState initial;
        initial.position = {rho, 0.0, -cfg.domain_halfspan_factor * rho};
        initial.direction = {0.0, 0.0, 1.0};
        const Trajectory traj = trace_ray(initial, star, model, cfg, constants, spin_phase);

        DeflectionRecord rec;
        rec.rho = rho;
        rec.spin_phase = spin_phase;
        rec.theta_grav = grav_deflection(star.mass, rho, constants);
        rec.theta_mag = traj.absorbed ? std::numeric_limits<double>::quiet_NaN()
                                      : deflection_from_trajectory(traj);
        rec.theta_total = rec.theta_grav + rec.theta_mag;
        records.push_back(rec);
    }
    return records;
}

std::vector<ModulationSample> modulation_sweep(const NeutronStar& star, const IndexModel& model,
                                               double rho, std::size_t n_phases,
                                               const IntegratorConfig& cfg,
                                               const PhysicalConstants& constants) {
    if (n_phases < 8) throw std::domain_error("need at least 8 modulation phases");
    if (!(rho > star.radius)) throw std::domain_error("rho must exceed the star radius");

    std::vector<ModulationSample> samples;
    samples.reserve(n_phases);
    for (std::size_t i = 0; i < n_phases; ++i) {
        const double phase = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_phases);
        RayState initial;
        initial.position = {rho, 0.0, -cfg.domain_halfspan_factor * rho};
        initial.direction = {0.0, 0.0, 1.0};
        const Trajectory traj = trace_ray(initial, star, model, cfg, constants, phase);
        const double theta = traj.absorbed ? std::numeric_limits<double>::quiet_NaN()
                                           : deflection_from_trajectory(traj);
        samples.push_back({phase, theta});
    }
    return samples;
}

}  // namespace qvlens
