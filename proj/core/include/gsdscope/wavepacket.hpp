#pragma once

#include <array>

#include "gsdscope/geometry.hpp"
#include "gsdscope/units.hpp"

namespace gsdscope {

/// Orientation of the trap and beam frames relative to the lab frame.
/// Both matrices are proper rotations; column i of `trap_to_lab` is trap
/// axis i in lab coordinates, likewise for `beam_to_lab` whose third column
/// is the beam propagation direction.
struct FrameSet {
    Mat3 trap_to_lab;
    Mat3 beam_to_lab;

    FrameSet(const Mat3& trap_to_lab_, const Mat3& beam_to_lab_);

    /// Trap axes at 45 degrees to the lab x/y plane,
    ///   x_t = (x+y)/sqrt2, y_t = (y-x)/sqrt2, z_t = z,
    /// beam frame tilted in the x/z plane,
    ///   x_B = (x+z)/sqrt2, y_B = y, z_B = (z-x)/sqrt2 (propagation).
    static FrameSet defaults();

    Vec3 trap_axis(int i) const { return trap_to_lab.column(i); }
    Vec3 beam_axis(int i) const { return beam_to_lab.column(i); }
    Vec3 propagation() const { return beam_to_lab.column(2); }
};

/// Root-mean-square extent of the motional ground state,
/// sigma0 = sqrt(hbar / (m omega)).
double ground_state_width(double mass, double omega,
                          const PhysicalConstants& pc = PhysicalConstants{});

/// Thermal width sigma = sigma0 * sqrt(2 nbar + 1).
double thermal_width(double sigma0, double nbar);

/// Gaussian probability cloud of the ion, axis-aligned in the trap frame.
struct WavePacket {
    double sigma_x;  ///< rms width along trap axis x [m]
    double sigma_y;  ///< rms width along trap axis y [m]
    double sigma_z;  ///< rms width along trap axis z [m]
    Vec3 center;     ///< packet center in lab coordinates [m]

    WavePacket(double sx, double sy, double sz, Vec3 center_ = {});
};

/// Thermal wave packet of `state` in `trap`, centered at `center`.
WavePacket thermal_wavepacket(const TrapSpec& trap, const ThermalState& state,
                              Vec3 center = {},
                              const PhysicalConstants& pc = PhysicalConstants{});

/// Probability density [1/m^3] at a lab-frame point; a normalized Gaussian
/// with the packet's widths along the trap axes.
double density(const WavePacket& wp, const FrameSet& frames, Vec3 point_lab);

/// Transverse beam-plane coordinates (along beam axes x_B, y_B) of a
/// lab-frame point [m].
std::array<double, 2> beam_transverse_coords(const FrameSet& frames, Vec3 point_lab);

/// Components of the beam wave vector (magnitude k, along the propagation
/// axis) on the three trap axes [1/m]. The squared components sum to k^2.
std::array<double, 3> k_projections(const FrameSet& frames, double k);

} // namespace gsdscope
