#include "gsdscope/budget.hpp"

#include <cmath>
#include <numbers>

#include "gsdscope/errors.hpp"

namespace gsdscope {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
} // namespace

double SetupSpec::w0k() const {
    const double v = waist * transition.wavenumber();
    if (v <= 1.0)
        throw DomainError("waist times wavenumber must exceed 1; the beam model is paraxial");
    return v;
}

std::string channel_name(ErrorChannel channel) {
    switch (channel) {
        case ErrorChannel::BField: return "b_field";
        case ErrorChannel::PulseWidth: return "pulse_width";
        case ErrorChannel::PowerBroadening: return "power_broadening";
        case ErrorChannel::Polarization: return "polarization";
    }
    throw DomainError("unknown error channel");
}

double power_no_superresolution(const SetupSpec& setup, const PhysicalConstants& pc) {
    if (setup.waist <= 0.0 || setup.tau <= 0.0)
        throw DomainError("setup needs positive waist and pulse duration");
    const double lambda = setup.transition.wavelength;
    const double pi5 = kPi * kPi * kPi * kPi * kPi;
    return 2.0 * pi5 * kE * pc.hbar * pc.speed_of_light * setup.waist * setup.waist /
           (3.0 * lambda * lambda * lambda * setup.transition.linewidth * setup.tau * setup.tau);
}

double saturation(double power, const SetupSpec& setup, const PhysicalConstants& pc) {
    if (power < 0.0) throw DomainError("power must be non-negative");
    return power / power_no_superresolution(setup, pc);
}

double bfield_angular_factor(double theta_b, double gamma_pol) {
    const double g = 0.5 * gamma_pol;
    const double cg = std::cos(g);
    const double sg = std::sin(g);
    const double ct = std::cos(theta_b);
    const double c2t = std::cos(2.0 * theta_b);
    const double denom = cg * c2t + ct * sg;
    if (std::abs(denom) < 1e-9)
        throw SingularityError("tilt angular factor is singular at this polarization angle");
    return std::sin(theta_b) * (cg + 2.0 * cg * ct + sg) / denom;
}

double bfield_rabi_ratio(double theta_b, double gamma_pol, double w0k) {
    if (w0k <= 0.0) throw DomainError("w0 k must be positive");
    return bfield_angular_factor(theta_b, gamma_pol) / (std::sqrt(2.0) * w0k);
}

double bfield_rabi_ratio(const SetupSpec& setup) {
    return bfield_rabi_ratio(setup.theta_b, setup.gamma_pol, setup.w0k());
}

double channel_coefficient(ErrorChannel channel, const SetupSpec& setup) {
    switch (channel) {
        case ErrorChannel::BField: {
            const double a = bfield_angular_factor(setup.theta_b, setup.gamma_pol);
            return kPi * kPi / 8.0 * a * a;
        }
        case ErrorChannel::PulseWidth:
            return kPi * kPi / 4.0 * 2.5 * setup.leakage_factor;
        case ErrorChannel::PowerBroadening: {
            const double r = kPi / (setup.tau * setup.delta);
            return 2.5 * r * r;
        }
        case ErrorChannel::Polarization: {
            const double r = kPi / (setup.tau * setup.delta);
            return r * r * setup.pol_error;
        }
    }
    throw DomainError("unknown error channel");
}

double spurious_probability(ErrorChannel channel, double s, const SetupSpec& setup) {
    if (s < 0.0) throw DomainError("saturation must be non-negative");
    const double w0k = setup.w0k();
    return channel_coefficient(channel, setup) * s / (w0k * w0k);
}

double spurious_probability_exact(ErrorChannel channel, double s, const SetupSpec& setup) {
    const double x = std::sin(std::sqrt(spurious_probability(channel, s, setup)));
    return x * x;
}

LeakageEstimate spectral_leakage(double tau, double delta) {
    if (tau <= 0.0) throw DomainError("pulse duration must be positive");
    const double x = 0.5 * tau * std::abs(delta);
    LeakageEstimate out;
    out.sinc_envelope = x <= 1.0 ? 1.0 : 1.0 / (x * x);

    // Midpoint transform of the flat window, |(1/N) sum exp(i delta t_n)|^2.
    constexpr int n = 8192;
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * tau / n;
        re += std::cos(delta * t);
        im += std::sin(delta * t);
    }
    re /= n;
    im /= n;
    out.dft_power = re * re + im * im;
    return out;
}

double s_limit(ErrorChannel channel, double p_max, const SetupSpec& setup) {
    if (p_max <= 0.0) throw DomainError("probability cap must be positive");
    const double w0k = setup.w0k();
    return p_max * w0k * w0k / channel_coefficient(channel, setup);
}

double sigma_limit(double s_norm, const TransitionSpec& transition, SigmaLimitMode mode) {
    if (s_norm <= 0.0) throw DomainError("normalized saturation must be positive");
    const double lambda = transition.wavelength;
    if (mode == SigmaLimitMode::Derived)
        return lambda / (2.0 * kPi * std::sqrt(2.0 * kPi * kPi * kE * s_norm));
    return lambda / (2.0 * kPi * std::sqrt(2.0 * kPi * kPi * kPi * kE) * std::sqrt(s_norm));
}

std::vector<BudgetEntry> budget_table(double p_max, const SetupSpec& setup) {
    static constexpr ErrorChannel order[4] = {
        ErrorChannel::BField,
        ErrorChannel::PulseWidth,
        ErrorChannel::PowerBroadening,
        ErrorChannel::Polarization,
    };
    static constexpr double ref_s[4] = {1e2, 1e3, 1e4, 1e6};
    static constexpr double ref_sigma[4] = {9e-9, 4e-9, 1e-9, 0.1e-9};

    std::vector<BudgetEntry> table;
    table.reserve(4);
    for (int i = 0; i < 4; ++i) {
        BudgetEntry e;
        e.channel = order[i];
        e.coefficient = channel_coefficient(order[i], setup);
        e.s_limit = s_limit(order[i], p_max, setup);
        e.s_limit_normalized = p_max / e.coefficient;
        e.sigma_limit_derived =
            sigma_limit(e.s_limit_normalized, setup.transition, SigmaLimitMode::Derived);
        e.sigma_limit_reference =
            sigma_limit(e.s_limit_normalized, setup.transition, SigmaLimitMode::Reference);
        e.reference_s = ref_s[i];
        e.reference_sigma = ref_sigma[i];
        table.push_back(e);
    }
    return table;
}

} // namespace gsdscope
