#pragma once

#include <array>

#include "gsdscope/units.hpp"

namespace gsdscope {

/// Square depletion pulse.
struct PulseSpec {
    double tau;  ///< pulse length [s]

    explicit PulseSpec(double tau_s);

    /// 19 us.
    static PulseSpec defaults();
};

/// How per-mode thermal occupation enters the dephasing parameter.
enum class BetaVariant {
    EtaSquared,  ///< beta = sum_i eta_i^2 * nbar_i (default)
    EtaLinear,   ///< beta = sum_i eta_i * nbar_i (kept for comparison)
};

/// Motional dephasing strength of the carrier Rabi oscillation.
struct DephasingBeta {
    double beta = 0.0;
    std::array<double, 3> per_mode{0.0, 0.0, 0.0};
};

/// Two-level excitation after a resonant square pulse, sin^2(omega*tau/2).
/// Throws DomainError for omega < 0 or tau < 0.
double coherent_excitation(double omega, double tau);

/// Lamb-Dicke parameter eta = k_eff * sqrt(hbar / (2 m omega_mode)) for the
/// wave-vector component k_eff [1/m] along a trap mode.
/// Throws DomainError for k_eff < 0 or non-positive mass/frequency.
double lamb_dicke(double k_eff, double mass, double omega_mode,
                  const PhysicalConstants& pc = PhysicalConstants{});

/// Dephasing parameter from the three trap modes. `k_projections` holds the
/// wave-vector components along the trap axes [1/m].
DephasingBeta dephasing_beta(const TrapSpec& trap, const ThermalState& state,
                             const std::array<double, 3>& k_projections,
                             BetaVariant variant = BetaVariant::EtaSquared,
                             const PhysicalConstants& pc = PhysicalConstants{});

/// Thermally averaged excitation of the carrier after a square pulse:
/// P = 1/2 * [1 - (cos(phi) + phi*beta*sin(phi)) / (1 + (phi*beta)^2)]
/// with phi = omega*tau. Reduces to coherent_excitation at beta = 0 and
/// saturates to 1/2 at phi*beta >> 1. Always in [0, 1].
double thermal_excitation(double omega, double tau, const DephasingBeta& beta);

/// Reference evaluation of the thermal average as an explicit sum over Fock
/// states: sum_n p(n) sin^2(Omega_n tau/2) with
/// Omega_n = omega * prod_i (1 - eta_i^2 n_i) and geometric weights
/// p(n_i) = nbar_i^{n_i} / (nbar_i + 1)^{n_i + 1}. Each mode is truncated at
/// min(n_max, adaptive cutoff); throws AccuracyError when the captured
/// thermal weight falls below 1 - 1e-9.
double thermal_excitation_fock_oracle(double omega, double tau, const TrapSpec& trap,
                                      const ThermalState& state,
                                      const std::array<double, 3>& k_projections,
                                      int n_max,
                                      const PhysicalConstants& pc = PhysicalConstants{});

/// Steady sideband asymmetry of a thermal mode: p_rsb/p_bsb = nbar/(nbar+1).
double sideband_excitation_ratio(double nbar);

/// A probability with a 1-sigma uncertainty (0 when unknown).
struct Measurement {
    double value = 0.0;
    double sigma = 0.0;
};

/// Binomial 1-sigma for `shots` repetitions of a Bernoulli trial.
Measurement binomial_measurement(double p, long shots);

struct NbarEstimate {
    double nbar = 0.0;
    double sigma = 0.0;
};

/// Inverts the sideband asymmetry: nbar = p/(1-p) with p = p_rsb/p_bsb.
/// Propagates the input uncertainties when present. Throws DomainError when
/// p_rsb >= p_bsb (ratio at or above 1 has no thermal solution) or when
/// p_bsb <= 0 with p_rsb > 0. A vanishing red sideband gives nbar = 0.
NbarEstimate nbar_from_sideband_ratio(const Measurement& p_rsb, const Measurement& p_bsb);
NbarEstimate nbar_from_sideband_ratio(double p_rsb, double p_bsb);

} // namespace gsdscope
