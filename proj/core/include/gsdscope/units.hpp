#pragma once

#include <string>
#include <string_view>

#include "gsdscope/errors.hpp"

namespace gsdscope {

// ============================================================================
// Physical constants (SI)
// ============================================================================

namespace constants {

/// Reduced Planck constant [J s].
inline constexpr double kHbar = 1.054571817e-34;

/// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Atomic mass unit [kg].
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

/// Euler's number.
inline constexpr double kEuler = 2.718281828459045;

} // namespace constants

/// Bundle of the constants the physics kernels consume. Kept as a value type
/// so non-SI unit systems can be injected in tests.
struct PhysicalConstants {
    double hbar = constants::kHbar;
    double speed_of_light = constants::kSpeedOfLight;
    double atomic_mass_unit = constants::kAtomicMassUnit;
    double euler = constants::kEuler;
};

/// SI defaults.
PhysicalConstants default_constants();

// ============================================================================
// Quantities with units
// ============================================================================

enum class Unit {
    Meter,
    Second,
    Watt,
    Hertz,
    RadiansPerSecond,
    Dimensionless,
};

/// Canonical unit symbol ("m", "s", "W", "Hz", "rad/s", "").
std::string_view unit_symbol(Unit unit);

/// A magnitude in the canonical SI unit for its dimension.
struct Quantity {
    double value = 0.0;
    Unit unit = Unit::Dimensionless;
};

/// Parses "<number><optional space><SI-prefixed unit>" into canonical SI.
/// Supported units: m, s, W, Hz, rad/s, or none (dimensionless); supported
/// prefixes: n, u, m, k, M. The form "2pi*<frequency>" converts a frequency
/// to angular frequency in rad/s ("2pi*760kHz" -> 4.775e6 rad/s).
/// Throws ParseError naming the offending token.
Quantity parse_quantity(std::string_view text);

/// Formats in the canonical unit with round-trippable precision;
/// parse_quantity(format_quantity(q)) reproduces q.
std::string format_quantity(const Quantity& q);

/// parse_quantity plus a dimension check. Throws ParseError if the parsed
/// unit differs from `expected`.
double parse_quantity_as(std::string_view text, Unit expected);

// ============================================================================
// Specs
// ============================================================================

/// Natural linewidth in cycles per second for a spontaneous lifetime in
/// seconds: gamma = 1/(2*pi*lifetime). Throws DomainError for lifetime <= 0.
double gamma_from_lifetime(double lifetime_s);

/// Optical transition driven by the depletion beam.
struct TransitionSpec {
    double wavelength;   ///< [m]
    double linewidth;    ///< natural linewidth [Hz] (cycles per second)

    TransitionSpec(double wavelength_m, double linewidth_hz);

    /// k = 2*pi/wavelength, always derived, never stored.
    double wavenumber() const;

    /// 729 nm transition with the 1.168 s spontaneous lifetime.
    static TransitionSpec defaults();
};

/// Three-mode harmonic trap.
struct TrapSpec {
    double mass;        ///< ion mass [kg]
    double omega_x;     ///< secular frequency, radial mode x [rad/s]
    double omega_y;     ///< secular frequency, radial mode y [rad/s]
    double omega_z;     ///< secular frequency, axial mode z [rad/s]

    TrapSpec(double mass_kg, double omega_x_rad, double omega_y_rad,
             double omega_z_rad);

    /// 40 amu ion at 2*pi*{1.5, 1.5, 0.76} MHz.
    static TrapSpec defaults();
};

/// Mean phonon numbers of the three trap modes.
struct ThermalState {
    double nbar_x;
    double nbar_y;
    double nbar_z;

    ThermalState(double nbar_x_, double nbar_y_, double nbar_z_);

    /// Doppler-limit occupation {5, 5, 10}.
    static ThermalState defaults();
};

} // namespace gsdscope
