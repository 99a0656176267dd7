#include "gsdscope/dynamics.hpp"

#include <cmath>
#include <vector>

namespace gsdscope {

PulseSpec::PulseSpec(double tau_s) : tau(tau_s) {
    if (!(tau > 0.0)) throw DomainError("pulse: length must be positive");
}

PulseSpec PulseSpec::defaults() { return PulseSpec(19e-6); }

double coherent_excitation(double omega, double tau) {
    if (omega < 0.0) throw DomainError("coherent_excitation: omega must be non-negative");
    if (tau < 0.0) throw DomainError("coherent_excitation: tau must be non-negative");
    const double s = std::sin(0.5 * omega * tau);
    return s * s;
}

double lamb_dicke(double k_eff, double mass, double omega_mode, const PhysicalConstants& pc) {
    if (k_eff < 0.0) throw DomainError("lamb_dicke: k component must be non-negative");
    if (!(mass > 0.0)) throw DomainError("lamb_dicke: mass must be positive");
    if (!(omega_mode > 0.0)) throw DomainError("lamb_dicke: mode frequency must be positive");
    return k_eff * std::sqrt(pc.hbar / (2.0 * mass * omega_mode));
}

DephasingBeta dephasing_beta(const TrapSpec& trap, const ThermalState& state,
                             const std::array<double, 3>& k_projections, BetaVariant variant,
                             const PhysicalConstants& pc) {
    const std::array<double, 3> omegas{trap.omega_x, trap.omega_y, trap.omega_z};
    const std::array<double, 3> nbars{state.nbar_x, state.nbar_y, state.nbar_z};
    DephasingBeta out;
    for (int i = 0; i < 3; ++i) {
        const double eta = lamb_dicke(std::abs(k_projections[i]), trap.mass, omegas[i], pc);
        out.per_mode[i] = (variant == BetaVariant::EtaSquared ? eta * eta : eta) * nbars[i];
        out.beta += out.per_mode[i];
    }
    return out;
}

double thermal_excitation(double omega, double tau, const DephasingBeta& beta) {
    if (omega < 0.0) throw DomainError("thermal_excitation: omega must be non-negative");
    if (tau < 0.0) throw DomainError("thermal_excitation: tau must be non-negative");
    const double phi = omega * tau;
    const double pb = phi * beta.beta;
    return 0.5 * (1.0 - (std::cos(phi) + pb * std::sin(phi)) / (1.0 + pb * pb));
}

namespace {

// Geometric distribution of one mode, truncated to keep residual weight
// below `residual`, with a hard cap. Returns weights and captured mass.
void mode_weights(double nbar, int cap, double residual, std::vector<double>& w, double& mass) {
    w.clear();
    if (nbar <= 0.0) {
        w.push_back(1.0);
        mass = 1.0;
        return;
    }
    const double q = nbar / (nbar + 1.0);
    double p = 1.0 / (nbar + 1.0);
    double tail = 1.0;
    mass = 0.0;
    for (int n = 0; n <= cap; ++n) {
        w.push_back(p);
        mass += p;
        tail *= q;  // residual weight beyond n
        if (tail < residual) break;
        p *= q;
    }
}

} // namespace

double thermal_excitation_fock_oracle(double omega, double tau, const TrapSpec& trap,
                                      const ThermalState& state,
                                      const std::array<double, 3>& k_projections, int n_max,
                                      const PhysicalConstants& pc) {
    if (omega < 0.0) throw DomainError("fock oracle: omega must be non-negative");
    if (tau < 0.0) throw DomainError("fock oracle: tau must be non-negative");
    if (n_max < 0) throw DomainError("fock oracle: n_max must be non-negative");

    const std::array<double, 3> omegas{trap.omega_x, trap.omega_y, trap.omega_z};
    const std::array<double, 3> nbars{state.nbar_x, state.nbar_y, state.nbar_z};
    std::array<double, 3> eta2{};
    std::array<std::vector<double>, 3> w;
    double mass = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double eta = lamb_dicke(std::abs(k_projections[i]), trap.mass, omegas[i], pc);
        eta2[i] = eta * eta;
        double m = 0.0;
        mode_weights(nbars[i], n_max, 1e-12, w[i], m);
        mass *= m;
    }
    if (mass < 1.0 - 1e-9)
        throw AccuracyError("fock oracle: truncated thermal weight " + std::to_string(mass) +
                            " below 1 - 1e-9; raise n_max");

    const double phi = omega * tau;
    double acc = 0.0;
    for (std::size_t n0 = 0; n0 < w[0].size(); ++n0) {
        const double f0 = 1.0 - eta2[0] * static_cast<double>(n0);
        for (std::size_t n1 = 0; n1 < w[1].size(); ++n1) {
            const double f01 = f0 * (1.0 - eta2[1] * static_cast<double>(n1));
            const double w01 = w[0][n0] * w[1][n1];
            for (std::size_t n2 = 0; n2 < w[2].size(); ++n2) {
                const double f = f01 * (1.0 - eta2[2] * static_cast<double>(n2));
                const double s = std::sin(0.5 * phi * f);
                acc += w01 * w[2][n2] * s * s;
            }
        }
    }
    return acc / mass;
}

double sideband_excitation_ratio(double nbar) {
    if (nbar < 0.0) throw DomainError("sideband ratio: nbar must be non-negative");
    return nbar / (nbar + 1.0);
}

Measurement binomial_measurement(double p, long shots) {
    if (p < 0.0 || p > 1.0) throw DomainError("binomial_measurement: p outside [0, 1]");
    if (shots <= 0) throw DomainError("binomial_measurement: shots must be positive");
    const double n = static_cast<double>(shots);
    const double sigma = std::max(std::sqrt(p * (1.0 - p) / n), 0.5 / n);
    return {p, sigma};
}

NbarEstimate nbar_from_sideband_ratio(const Measurement& p_rsb, const Measurement& p_bsb) {
    const double r = p_rsb.value;
    const double b = p_bsb.value;
    if (r < 0.0 || b < 0.0) throw DomainError("sideband inversion: probabilities must be >= 0");
    if (r >= b)
        throw DomainError("sideband inversion: p_rsb/p_bsb >= 1 has no thermal solution");
    // r < b here, so b > 0
    const double p = r / b;
    const double one_minus = 1.0 - p;
    const double nbar = p / one_minus;
    double sigma = 0.0;
    if (p_rsb.sigma > 0.0 || p_bsb.sigma > 0.0) {
        const double dp2 = (p_rsb.sigma / b) * (p_rsb.sigma / b) +
                           (r * p_bsb.sigma / (b * b)) * (r * p_bsb.sigma / (b * b));
        sigma = std::sqrt(dp2) / (one_minus * one_minus);
    }
    return {nbar, sigma};
}

NbarEstimate nbar_from_sideband_ratio(double p_rsb, double p_bsb) {
    return nbar_from_sideband_ratio(Measurement{p_rsb, 0.0}, Measurement{p_bsb, 0.0});
}

} // namespace gsdscope
