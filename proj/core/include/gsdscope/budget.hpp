#pragma once

#include <array>
#include <string>
#include <vector>

#include "gsdscope/units.hpp"

namespace gsdscope {

/// Apparatus model for the saturation-limit budget.
struct SetupSpec {
    double waist = 4.2e-6;                ///< doughnut waist w0 [m]
    double tau = 19e-6;                   ///< pulse duration [s]
    TransitionSpec transition = TransitionSpec::defaults();
    double theta_b = 3.0 * 0.017453292519943295;  ///< quantization-axis tilt [rad]
    double gamma_pol = 3.0 * 0.7853981633974483;  ///< polarization angle [rad]
    double pol_error = 0.01;              ///< residual polarization admixture
    double delta = 2.0 * 3.141592653589793 * 4e6; ///< spectator detuning [rad/s]
    double leakage_factor = 6e-4;         ///< spectral weight reaching the spectator

    /// waist in units of the reduced wavelength; must exceed 1 (paraxial beam)
    double w0k() const;
};

/// Channels that excite the ion at the doughnut center and cap the usable
/// saturation before the background swamps the depletion signal.
enum class ErrorChannel {
    BField,           ///< quantization-axis tilt reopens the center coupling
    PulseWidth,       ///< finite pulse bandwidth drives the spectator line
    PowerBroadening,  ///< off-resonant carrier coupling to the spectator
    Polarization,     ///< residual wrong-helicity light
};

std::string channel_name(ErrorChannel channel);

/// Power at which the doughnut center itself reaches a pi Rabi phase:
/// P_NS = 2 pi^5 e hbar c w0^2 / (3 lambda^3 gamma tau^2). Above it the
/// response width stops shrinking with power.
double power_no_superresolution(const SetupSpec& setup,
                                const PhysicalConstants& pc = PhysicalConstants{});

/// Saturation s = P / P_NS.
double saturation(double power, const SetupSpec& setup,
                  const PhysicalConstants& pc = PhysicalConstants{});

/// Angular factor of the tilt-induced center coupling,
/// sin(theta_b) * (cos g + 2 cos g cos t + sin g) / (cos g cos 2t + cos t sin g)
/// evaluated at g = gamma_pol / 2, t = theta_b. Throws SingularityError when
/// the denominator vanishes.
double bfield_angular_factor(double theta_b, double gamma_pol);

/// Center-to-peak Rabi-frequency ratio of the tilt channel,
/// angular / (sqrt(2) * w0 k).
double bfield_rabi_ratio(double theta_b, double gamma_pol, double w0k);
double bfield_rabi_ratio(const SetupSpec& setup);

/// Dimensionless prefactor c of the spurious center excitation
/// p = c * s / (w0 k)^2 for the given channel.
double channel_coefficient(ErrorChannel channel, const SetupSpec& setup);

/// Spurious center excitation, linear in the saturation.
double spurious_probability(ErrorChannel channel, double s, const SetupSpec& setup);

/// Same channel beyond the linear regime: sin^2 of the spurious Rabi phase,
/// equal to the linear form for small s and capped at 1.
double spurious_probability_exact(ErrorChannel channel, double s, const SetupSpec& setup);

/// Spectral weight of a flat pulse at detuning delta.
struct LeakageEstimate {
    double sinc_envelope = 0.0;  ///< min(1, (2 / (tau delta))^2), the sinc bound
    double dft_power = 0.0;      ///< numeric |window transform|^2 at delta
};

LeakageEstimate spectral_leakage(double tau, double delta);

/// Largest saturation with spurious excitation below p_max:
/// s = p_max (w0 k)^2 / coefficient.
double s_limit(ErrorChannel channel, double p_max, const SetupSpec& setup);

enum class SigmaLimitMode {
    Derived,    ///< sigma = lambda / (2 pi sqrt(2 pi^2 e s)), from the response width
    Reference,  ///< sigma = lambda / (2 pi sqrt(2 pi^3 e) sqrt(s)), published form
};

/// Resolution reached at normalized saturation s_norm = s / (w0 k)^2.
/// Depends only on the wavelength, never on the waist.
double sigma_limit(double s_norm, const TransitionSpec& transition,
                   SigmaLimitMode mode = SigmaLimitMode::Derived);

/// One budget row: the channel, its prefactor, and the resulting limits.
/// s_limit_normalized = s_limit / (w0 k)^2 = p_max / coefficient is the
/// quantity tabulated in decades; the sigma limits derive from it alone.
struct BudgetEntry {
    ErrorChannel channel = ErrorChannel::BField;
    double coefficient = 0.0;
    double s_limit = 0.0;
    double s_limit_normalized = 0.0;
    double sigma_limit_derived = 0.0;    ///< [m]
    double sigma_limit_reference = 0.0;  ///< [m]
    double reference_s = 0.0;            ///< published order-of-magnitude limit / (w0 k)^2
    double reference_sigma = 0.0;        ///< published resolution at that limit [m]
};

/// All four channels in published order. Computed limits use p_max;
/// reference columns are fixed decades.
std::vector<BudgetEntry> budget_table(double p_max, const SetupSpec& setup);

} // namespace gsdscope
