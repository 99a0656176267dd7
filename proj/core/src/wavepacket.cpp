#include "gsdscope/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gsdscope {

namespace {

constexpr double kOrthoTol = 1e-12;

void check_rotation(const Mat3& m, const char* name) {
    // columns orthonormal
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const double d = m.column(a).dot(m.column(b));
            const double want = (a == b) ? 1.0 : 0.0;
            if (std::abs(d - want) > kOrthoTol)
                throw DomainError(std::string(name) + ": axes are not orthonormal");
        }
    }
    if (std::abs(m.det() - 1.0) > kOrthoTol)
        throw DomainError(std::string(name) + ": determinant must be +1 (right-handed)");
}

} // namespace

FrameSet::FrameSet(const Mat3& trap_to_lab_, const Mat3& beam_to_lab_)
    : trap_to_lab(trap_to_lab_), beam_to_lab(beam_to_lab_) {
    check_rotation(trap_to_lab, "trap frame");
    check_rotation(beam_to_lab, "beam frame");
}

FrameSet FrameSet::defaults() {
    const double s = 1.0 / std::numbers::sqrt2;
    const Mat3 trap = Mat3::from_columns({s, s, 0.0}, {-s, s, 0.0}, {0.0, 0.0, 1.0});
    const Mat3 beam = Mat3::from_columns({s, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, s});
    return FrameSet(trap, beam);
}

double ground_state_width(double mass, double omega, const PhysicalConstants& pc) {
    if (!(mass > 0.0)) throw DomainError("ground_state_width: mass must be positive");
    if (!(omega > 0.0)) throw DomainError("ground_state_width: frequency must be positive");
    return std::sqrt(pc.hbar / (mass * omega));
}

double thermal_width(double sigma0, double nbar) {
    if (!(sigma0 > 0.0)) throw DomainError("thermal_width: sigma0 must be positive");
    if (nbar < 0.0) throw DomainError("thermal_width: nbar must be non-negative");
    return sigma0 * std::sqrt(2.0 * nbar + 1.0);
}

WavePacket::WavePacket(double sx, double sy, double sz, Vec3 center_)
    : sigma_x(sx), sigma_y(sy), sigma_z(sz), center(center_) {
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !(sigma_z > 0.0))
        throw DomainError("wave packet: widths must be positive");
}

WavePacket thermal_wavepacket(const TrapSpec& trap, const ThermalState& state, Vec3 center,
                              const PhysicalConstants& pc) {
    return WavePacket(
        thermal_width(ground_state_width(trap.mass, trap.omega_x, pc), state.nbar_x),
        thermal_width(ground_state_width(trap.mass, trap.omega_y, pc), state.nbar_y),
        thermal_width(ground_state_width(trap.mass, trap.omega_z, pc), state.nbar_z), center);
}

double density(const WavePacket& wp, const FrameSet& frames, Vec3 point_lab) {
    const Vec3 d = frames.trap_to_lab.apply_transposed(point_lab - wp.center);
    const double qx = d.x / wp.sigma_x;
    const double qy = d.y / wp.sigma_y;
    const double qz = d.z / wp.sigma_z;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double norm = std::pow(two_pi, -1.5) / (wp.sigma_x * wp.sigma_y * wp.sigma_z);
    return norm * std::exp(-0.5 * (qx * qx + qy * qy + qz * qz));
}

std::array<double, 2> beam_transverse_coords(const FrameSet& frames, Vec3 point_lab) {
    return {frames.beam_axis(0).dot(point_lab), frames.beam_axis(1).dot(point_lab)};
}

std::array<double, 3> k_projections(const FrameSet& frames, double k) {
    if (!(k > 0.0)) throw DomainError("k_projections: wavenumber must be positive");
    const Vec3 kvec = frames.propagation() * k;
    return {kvec.dot(frames.trap_axis(0)), kvec.dot(frames.trap_axis(1)),
            kvec.dot(frames.trap_axis(2))};
}

} // namespace gsdscope
