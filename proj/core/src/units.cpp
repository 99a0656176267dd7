#include "gsdscope/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace gsdscope {

PhysicalConstants default_constants() { return {}; }

std::string_view unit_symbol(Unit unit) {
    switch (unit) {
    case Unit::Meter: return "m";
    case Unit::Second: return "s";
    case Unit::Watt: return "W";
    case Unit::Hertz: return "Hz";
    case Unit::RadiansPerSecond: return "rad/s";
    case Unit::Dimensionless: return "";
    }
    return "";
}

namespace {

bool prefix_factor(char c, double& factor) {
    switch (c) {
    case 'n': factor = 1e-9; return true;
    case 'u': factor = 1e-6; return true;
    case 'm': factor = 1e-3; return true;
    case 'k': factor = 1e3; return true;
    case 'M': factor = 1e6; return true;
    default: return false;
    }
}

// Splits a unit token into prefix factor and unit, longest unit match first.
bool match_unit(std::string_view tok, double& factor, Unit& unit) {
    factor = 1.0;
    static constexpr std::array<std::pair<std::string_view, Unit>, 5> kUnits{{
        {"rad/s", Unit::RadiansPerSecond},
        {"Hz", Unit::Hertz},
        {"W", Unit::Watt},
        {"m", Unit::Meter},
        {"s", Unit::Second},
    }};
    if (tok.empty()) {
        unit = Unit::Dimensionless;
        return true;
    }
    for (const auto& [sym, u] : kUnits) {
        if (tok.size() < sym.size()) continue;
        if (tok.substr(tok.size() - sym.size()) != sym) continue;
        std::string_view rest = tok.substr(0, tok.size() - sym.size());
        if (rest.empty()) {
            unit = u;
            return true;
        }
        if (rest.size() == 1 && prefix_factor(rest[0], factor)) {
            unit = u;
            return true;
        }
    }
    return false;
}

} // namespace

Quantity parse_quantity(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw ParseError("empty quantity string");

    bool two_pi = false;
    if (s.starts_with("2pi*")) {
        two_pi = true;
        s.remove_prefix(4);
    }

    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin)
        throw ParseError("quantity '" + std::string(text) + "': no leading number");

    std::string_view tok(ptr, static_cast<std::size_t>(end - ptr));
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);

    double factor = 1.0;
    Unit unit = Unit::Dimensionless;
    if (!match_unit(tok, factor, unit))
        throw ParseError("quantity '" + std::string(text) + "': unknown unit token '" +
                         std::string(tok) + "'");

    double out = value * factor;
    if (two_pi) {
        if (unit != Unit::Hertz)
            throw ParseError("quantity '" + std::string(text) +
                             "': 2pi* requires a frequency in Hz");
        out *= 2.0 * std::numbers::pi;
        unit = Unit::RadiansPerSecond;
    }
    return {out, unit};
}

std::string format_quantity(const Quantity& q) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", q.value);
    return std::string(buf) + std::string(unit_symbol(q.unit));
}

double parse_quantity_as(std::string_view text, Unit expected) {
    Quantity q = parse_quantity(text);
    if (q.unit != expected)
        throw ParseError("quantity '" + std::string(text) + "': expected unit '" +
                         std::string(unit_symbol(expected)) + "', got '" +
                         std::string(unit_symbol(q.unit)) + "'");
    return q.value;
}

double gamma_from_lifetime(double lifetime_s) {
    if (!(lifetime_s > 0.0)) throw DomainError("lifetime must be positive");
    return 1.0 / (2.0 * std::numbers::pi * lifetime_s);
}

TransitionSpec::TransitionSpec(double wavelength_m, double linewidth_hz)
    : wavelength(wavelength_m), linewidth(linewidth_hz) {
    if (!(wavelength > 0.0)) throw DomainError("transition wavelength must be positive");
    if (!(linewidth > 0.0)) throw DomainError("transition linewidth must be positive");
}

double TransitionSpec::wavenumber() const {
    return 2.0 * std::numbers::pi / wavelength;
}

TransitionSpec TransitionSpec::defaults() {
    return TransitionSpec(729e-9, gamma_from_lifetime(1.168));
}

TrapSpec::TrapSpec(double mass_kg, double omega_x_rad, double omega_y_rad, double omega_z_rad)
    : mass(mass_kg), omega_x(omega_x_rad), omega_y(omega_y_rad), omega_z(omega_z_rad) {
    if (!(mass > 0.0)) throw DomainError("trap: ion mass must be positive");
    if (!(omega_x > 0.0) || !(omega_y > 0.0) || !(omega_z > 0.0))
        throw DomainError("trap: mode frequencies must be positive");
}

TrapSpec TrapSpec::defaults() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return TrapSpec(40.0 * constants::kAtomicMassUnit, two_pi * 1.5e6, two_pi * 1.5e6,
                    two_pi * 760e3);
}

ThermalState::ThermalState(double nbar_x_, double nbar_y_, double nbar_z_)
    : nbar_x(nbar_x_), nbar_y(nbar_y_), nbar_z(nbar_z_) {
    if (nbar_x < 0.0 || nbar_y < 0.0 || nbar_z < 0.0)
        throw DomainError("thermal state: mean phonon numbers must be non-negative");
}

ThermalState ThermalState::defaults() { return ThermalState(5.0, 5.0, 10.0); }

} // namespace gsdscope
