#ifndef QVLENS_CONSTANTS_HPP
#define QVLENS_CONSTANTS_HPP

#include <numbers>
#include <stdexcept>

namespace qvlens {

inline constexpr double kPi = std::numbers::pi;

/// mu0 / 4pi in T m / A.
inline constexpr double kMu0Over4Pi = 1e-7;

/// 648000 / pi, the number of arcseconds in one radian.
inline constexpr double kArcsecPerRad = 648000.0 / kPi;

/// Polarization of the propagating light relative to the local magnetic field.
enum class Polarization {
    parallel,
    perpendicular,
    unpolarized_average,
};

/// Fundamental constants plus the vacuum birefringence couplings.
///
/// a_par and a_perp are the quadratic index couplings (n = 1 + a B^2) for the
/// two polarizations; the quadratic law degrades above b_crit.
struct PhysicalConstants {
    double G = 6.6743e-11;      // m^3 kg^-1 s^-2
    double c = 299792458.0;     // m s^-1
    double a_par = 9e-24;       // T^-2
    double a_perp = 5e-24;      // T^-2
    double b_crit = 4.4e9;      // T

    bool operator==(const PhysicalConstants&) const = default;

    /// Index coupling selected by polarization; unpolarized light uses the
    /// arithmetic mean of the two couplings.
    double coupling_for(Polarization p) const {
        switch (p) {
            case Polarization::parallel: return a_par;
            case Polarization::perpendicular: return a_perp;
            case Polarization::unpolarized_average: return 0.5 * (a_par + a_perp);
        }
        throw std::logic_error("invalid polarization");
    }

    void validate() const {
        if (!(G > 0.0) || !(c > 0.0)) throw std::domain_error("G and c must be positive");
        if (!(a_par > a_perp) || !(a_perp > 0.0))
            throw std::domain_error("couplings must satisfy a_par > a_perp > 0");
        if (!(b_crit > 0.0)) throw std::domain_error("b_crit must be positive");
    }
};

}  // namespace qvlens

#endif
