#pragma once

#include <array>

#include "gsdscope/units.hpp"

namespace gsdscope {

enum class BeamShape {
    Vortex,    ///< first-order Laguerre-Gauss doughnut (orbital index magnitude 1)
    Gaussian,  ///< fundamental Gaussian
};

/// Focused depletion beam. `center` is the beam-axis position in the
/// transverse beam plane [m]; intensities are azimuthally symmetric around it.
struct BeamSpec {
    BeamShape shape = BeamShape::Vortex;
    double power;    ///< total optical power [W]
    double waist;    ///< 1/e^2 field waist w0 [m]
    std::array<double, 2> center{0.0, 0.0};
    TransitionSpec transition = TransitionSpec::defaults();

    BeamSpec(BeamShape shape_, double power_w, double waist_m,
             std::array<double, 2> center_m = {0.0, 0.0},
             TransitionSpec transition_ = TransitionSpec::defaults());
};

/// Doughnut intensity at radial distance r from the beam axis:
/// I(r) = (2 P0 / (pi w0^2)) * (2 r^2 / w0^2) * exp(-2 r^2 / w0^2).
/// Integrates to the total power; peaks at r = w0/sqrt(2).
/// Throws DomainError for r < 0.
double lg01_intensity(double r, const BeamSpec& beam);

/// Fundamental Gaussian intensity I(r) = (2 P0/(pi w0^2)) exp(-2 r^2/w0^2).
double gaussian_intensity(double r, const BeamSpec& beam);

/// Quadratic near-axis limit of the doughnut, I(r) = 4 r^2 P0 / (pi w0^4).
/// Agrees with lg01_intensity to < 1% for r < 0.05 w0.
double near_center_intensity(double r, const BeamSpec& beam);

/// Intensity of `beam` at radius r, dispatching on the shape.
double beam_intensity(double r, const BeamSpec& beam);

/// Rabi frequency [rad/s] of the quadrupole transition at intensity I:
/// Omega = sqrt(I * 3 lambda^3 gamma / (4 pi^2 hbar c)), with gamma the
/// natural linewidth in Hz. Scales as sqrt(I). Throws DomainError for I < 0.
double rabi_frequency(double intensity, const TransitionSpec& transition,
                      const PhysicalConstants& pc = PhysicalConstants{});

/// Rabi frequency at a point in the transverse beam plane [m].
double rabi_at(std::array<double, 2> point, const BeamSpec& beam,
               const PhysicalConstants& pc = PhysicalConstants{});

} // namespace gsdscope
