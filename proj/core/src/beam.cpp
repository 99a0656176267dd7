#include "gsdscope/beam.hpp"

#include <cmath>
#include <numbers>

namespace gsdscope {

namespace {
constexpr double kPi = std::numbers::pi;
}

BeamSpec::BeamSpec(BeamShape shape_, double power_w, double waist_m,
                   std::array<double, 2> center_m, TransitionSpec transition_)
    : shape(shape_), power(power_w), waist(waist_m), center(center_m),
      transition(transition_) {
    if (power < 0.0) throw DomainError("beam: power must be non-negative");
    if (!(waist > 0.0)) throw DomainError("beam: waist must be positive");
}

double lg01_intensity(double r, const BeamSpec& beam) {
    if (r < 0.0) throw DomainError("lg01_intensity: radius must be non-negative");
    const double w2 = beam.waist * beam.waist;
    const double u = 2.0 * r * r / w2;
    return (2.0 * beam.power / (kPi * w2)) * u * std::exp(-u);
}

double gaussian_intensity(double r, const BeamSpec& beam) {
    if (r < 0.0) throw DomainError("gaussian_intensity: radius must be non-negative");
    const double w2 = beam.waist * beam.waist;
    return (2.0 * beam.power / (kPi * w2)) * std::exp(-2.0 * r * r / w2);
}

double near_center_intensity(double r, const BeamSpec& beam) {
    if (r < 0.0) throw DomainError("near_center_intensity: radius must be non-negative");
    const double w2 = beam.waist * beam.waist;
    return 4.0 * r * r * beam.power / (kPi * w2 * w2);
}

double beam_intensity(double r, const BeamSpec& beam) {
    return beam.shape == BeamShape::Vortex ? lg01_intensity(r, beam)
                                           : gaussian_intensity(r, beam);
}

double rabi_frequency(double intensity, const TransitionSpec& transition,
                      const PhysicalConstants& pc) {
    if (intensity < 0.0) throw DomainError("rabi_frequency: intensity must be non-negative");
    const double lam3 = transition.wavelength * transition.wavelength * transition.wavelength;
    return std::sqrt(intensity * 3.0 * lam3 * transition.linewidth /
                     (4.0 * kPi * kPi * pc.hbar * pc.speed_of_light));
}

double rabi_at(std::array<double, 2> point, const BeamSpec& beam,
               const PhysicalConstants& pc) {
    const double dx = point[0] - beam.center[0];
    const double dy = point[1] - beam.center[1];
    const double r = std::hypot(dx, dy);
    return rabi_frequency(beam_intensity(r, beam), beam.transition, pc);
}

} // namespace gsdscope
