#ifndef QVLENS_BINARY_HPP
#define QVLENS_BINARY_HPP

#include <utility>
#include <vector>

#include "qvlens/constants.hpp"
#include "qvlens/star.hpp"
#include "qvlens/vec3.hpp"

namespace qvlens {

struct OrbitalElements {
    double period = 0.0;            // s
    double semi_major_axis = 0.0;   // m
    double eccentricity = 0.0;
    double inclination = 0.0;       // rad, pi/2 = edge-on
    double argument_of_periastron = 0.0;  // rad
    double epoch_phase = 0.0;       // rad, mean anomaly at t = 0

    bool operator==(const OrbitalElements&) const = default;

    void validate() const;
};

enum class LensedBody {
    a_by_b,  // pulsar A is the source, B the lens
    b_by_a,
};

enum class BeamProfile {
    tophat,
    gaussian,
};

/// Two pulsars on a shared orbit, one lensing the other's beam. The orbit
/// lies in the world x-y plane; the line of sight toward the observer is
/// (0, sin i, cos i).
struct BinaryScenario {
    NeutronStar pulsar_a;
    NeutronStar pulsar_b;
    OrbitalElements orbit;
    LensedBody lensed = LensedBody::a_by_b;
    double beam_half_width = 5e-4;  // rad
    BeamProfile beam_profile = BeamProfile::tophat;
    IndexModel index_model;
    double a_coupling = 5e-24;  // T^-2

    void validate() const;

    const NeutronStar& lens_star() const;
    const NeutronStar& source_star() const;
    Vec3 line_of_sight() const;
};

struct FluxSample {
    double t = 0.0;              // s
    double relative_flux = 1.0;  // lensed flux / gravity-only flux, times beam factor
    bool eclipse = false;
    double rho_t = 0.0;            // m, instantaneous impact parameter of the beam
    double spin_phase_lens = 0.0;  // rad
};

/// Position of pulsar B relative to pulsar A at time t, from Kepler's
/// equation solved by Newton iteration. Throws if the iteration does not
/// converge within 50 steps.
Vec3 orbital_state(const OrbitalElements& orbit, double t);

/// Transverse distance between the lensing pulsar and the source-observer
/// line of sight at time t.
double los_offset(const BinaryScenario& scenario, double t);

/// Rotational phase (spin_phase0 + 2 pi t / spin_period) mod 2pi.
double spin_phase(const NeutronStar& star, double t);

/// Relative flux of the lensed pulsar sampled on [t0, t1] with step dt.
/// Flux is the ratio of total to gravity-only magnification times the beam
/// factor for the magnetically shifted beam; eclipsed samples have flux 0.
std::vector<FluxSample> flux_series(const BinaryScenario& scenario, double t0, double t1,
                                    double dt, const PhysicalConstants& constants);

/// Maximal contiguous runs of eclipsed samples as [t_start, t_end] pairs.
std::vector<std::pair<double, double>> eclipse_windows(const std::vector<FluxSample>& samples);

}  // namespace qvlens

#endif
