#include <array>
#include <cmath>

#include "doctest.h"
#include "gsdscope/wavepacket.hpp"

using namespace gsdscope;

namespace {

constexpr double kPi = 3.141592653589793;

Mat3 rotate_z(double a) {
    return Mat3::from_columns({std::cos(a), std::sin(a), 0.0},
                              {-std::sin(a), std::cos(a), 0.0}, {0.0, 0.0, 1.0});
}

Mat3 product(const Mat3& a, const Mat3& b) {
    return Mat3::from_columns(a.apply(b.column(0)), a.apply(b.column(1)), a.apply(b.column(2)));
}

bool orthonormal(const Mat3& m, double tol) {
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double dot = m.column(i).dot(m.column(j));
            if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tol) return false;
        }
    }
    return std::abs(m.det() - 1.0) <= tol;
}

} // namespace

TEST_SUITE("wavepacket") {

TEST_CASE("ground state width of the default trap") {
    const auto trap = TrapSpec::defaults();
    const double sz = ground_state_width(trap.mass, trap.omega_z);
    const double sr = ground_state_width(trap.mass, trap.omega_x);
    CHECK(sz == doctest::Approx(1.8234203849384494e-8).epsilon(1e-12));
    CHECK(sr == doctest::Approx(1.2979201424224588e-8).epsilon(1e-12));
    CHECK(sz == doctest::Approx(18.2e-9).epsilon(0.02));
    CHECK(sr == doctest::Approx(13.0e-9).epsilon(0.02));
    // Quadrupling the confinement halves the width.
    CHECK(ground_state_width(trap.mass, 4.0 * trap.omega_z) ==
          doctest::Approx(0.5 * sz).epsilon(1e-14));
    CHECK_THROWS_AS(ground_state_width(-1.0, trap.omega_z), DomainError);
}

TEST_CASE("thermal width grows with occupation") {
    const double s0 = 1.8234203849384494e-8;
    CHECK(thermal_width(s0, 0.0) == s0);
    CHECK(thermal_width(s0, 10.0) == doctest::Approx(8.35596193770596e-8).epsilon(1e-12));
    CHECK(thermal_width(s0, 1.1) == doctest::Approx(3.2618335458249654e-8).epsilon(1e-12));
    CHECK(thermal_width(1.2979201424224588e-8, 5.0) ==
          doctest::Approx(4.304714120259938e-8).epsilon(1e-12));

    // Strictly increasing, continuous at zero occupation.
    double prev = 0.0;
    for (double nbar : {0.0, 0.01, 0.3, 1.0, 4.0, 20.0, 100.0}) {
        const double w = thermal_width(s0, nbar);
        CHECK(w > prev);
        prev = w;
    }
    CHECK(thermal_width(s0, 1e-12) == doctest::Approx(s0).epsilon(1e-9));
}

TEST_CASE("thermal wave packet of the reference configurations") {
    const auto trap = TrapSpec::defaults();

    const auto hot = thermal_wavepacket(trap, ThermalState(5, 5, 10));
    CHECK(hot.sigma_x == doctest::Approx(43.1e-9).epsilon(0.01));
    CHECK(hot.sigma_y == doctest::Approx(43.1e-9).epsilon(0.01));
    CHECK(hot.sigma_z == doctest::Approx(83.5e-9).epsilon(0.01));
    CHECK(hot.sigma_x == doctest::Approx(4.304714120259938e-8).epsilon(1e-12));
    CHECK(hot.sigma_z == doctest::Approx(8.35596193770596e-8).epsilon(1e-12));

    const auto cold = thermal_wavepacket(trap, ThermalState(0, 0, 0));
    CHECK(cold.sigma_x == doctest::Approx(13.0e-9).epsilon(0.01));
    CHECK(cold.sigma_z == doctest::Approx(18.2e-9).epsilon(0.01));

    const Vec3 at{1e-7, -2e-7, 3e-7};
    const auto moved = thermal_wavepacket(trap, ThermalState(5, 5, 10), at);
    CHECK(moved.center.x == at.x);
    CHECK(moved.center.y == at.y);
    CHECK(moved.center.z == at.z);
}

TEST_CASE("density peaks at the center with the gaussian normalization") {
    const WavePacket wp(20e-9, 30e-9, 80e-9, {1e-7, 0.0, -1e-7});
    const auto frames = FrameSet::defaults();
    const double peak = 1.0 / (std::pow(2.0 * kPi, 1.5) * wp.sigma_x * wp.sigma_y * wp.sigma_z);

    CHECK(density(wp, frames, wp.center) == doctest::Approx(peak).epsilon(1e-12));

    const Vec3 off = wp.center + frames.trap_axis(2) * wp.sigma_z;
    CHECK(density(wp, frames, off) ==
          doctest::Approx(peak * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("density is invariant under a common rotation of frame and point") {
    const WavePacket wp(20e-9, 30e-9, 80e-9);
    const auto base = FrameSet::defaults();
    const Mat3 r = rotate_z(0.4);
    const FrameSet rotated(product(r, base.trap_to_lab), product(r, base.beam_to_lab));

    for (const Vec3& p : {Vec3{3e-8, -1e-8, 5e-8}, Vec3{-6e-8, 2e-8, 1e-8},
                          Vec3{1e-7, 1e-7, -9e-8}}) {
        CHECK(density(wp, rotated, r.apply(p)) ==
              doctest::Approx(density(wp, base, p)).epsilon(1e-12));
    }
}

TEST_CASE("density integrates to one") {
    const WavePacket wp(20e-9, 35e-9, 80e-9, {5e-8, 0.0, 0.0});
    const auto frames = FrameSet::defaults();

    // Midpoint rule over +-8 sigma along the trap axes.
    const int n = 96;
    const double span = 16.0;
    const double h = span / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tx = -8.0 + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double ty = -8.0 + (j + 0.5) * h;
            for (int k = 0; k < n; ++k) {
                const double tz = -8.0 + (k + 0.5) * h;
                const Vec3 p = wp.center + frames.trap_axis(0) * (tx * wp.sigma_x) +
                               frames.trap_axis(1) * (ty * wp.sigma_y) +
                               frames.trap_axis(2) * (tz * wp.sigma_z);
                acc += density(wp, frames, p);
            }
        }
    }
    acc *= wp.sigma_x * wp.sigma_y * wp.sigma_z * h * h * h;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("default frames are right-handed and orthonormal") {
    const auto frames = FrameSet::defaults();
    CHECK(orthonormal(frames.trap_to_lab, 1e-12));
    CHECK(orthonormal(frames.beam_to_lab, 1e-12));

    const double s = 1.0 / std::sqrt(2.0);
    const Vec3 tx = frames.trap_axis(0);
    CHECK(tx.x == doctest::Approx(s).epsilon(1e-14));
    CHECK(tx.y == doctest::Approx(s).epsilon(1e-14));
    CHECK(tx.z == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    const Vec3 tz = frames.trap_axis(2);
    CHECK(tz.z == doctest::Approx(1.0).epsilon(1e-14));

    const Vec3 prop = frames.propagation();
    CHECK(prop.x == doctest::Approx(-s).epsilon(1e-14));
    CHECK(prop.y == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(prop.z == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("frame construction rejects non-orthonormal matrices") {
    Mat3 bad = Mat3::identity();
    bad.m[0][0] = 2.0;
    CHECK_THROWS_AS(FrameSet(bad, Mat3::identity()), DomainError);

    // Left-handed (determinant -1) is rejected too.
    Mat3 mirror = Mat3::identity();
    mirror.m[0][0] = -1.0;
    CHECK_THROWS_AS(FrameSet(Mat3::identity(), mirror), DomainError);
}

TEST_CASE("frame transforms round-trip") {
    const auto frames = FrameSet::defaults();
    const Vec3 v{0.3, -1.2, 0.7};
    const Vec3 there = frames.beam_to_lab.apply(v);
    const Vec3 back = frames.beam_to_lab.apply_transposed(there);
    CHECK(back.x == doctest::Approx(v.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(v.y).epsilon(1e-12));
    CHECK(back.z == doctest::Approx(v.z).epsilon(1e-12));
}

TEST_CASE("transverse beam coordinates") {
    const auto frames = FrameSet::defaults();
    const double s = 1.0 / std::sqrt(2.0);

    const auto along_x = beam_transverse_coords(frames, {1e-6, 0.0, 0.0});
    CHECK(along_x[0] == doctest::Approx(s * 1e-6).epsilon(1e-12));
    CHECK(along_x[1] == doctest::Approx(0.0).scale(1e-6).epsilon(1e-14));

    // Along the propagation direction both transverse components vanish.
    const Vec3 prop = frames.propagation() * 3e-6;
    const auto on_axis = beam_transverse_coords(frames, prop);
    CHECK(std::abs(on_axis[0]) < 1e-18);
    CHECK(std::abs(on_axis[1]) < 1e-18);

    // A vector inside the transverse plane keeps its components and norm.
    const Vec3 v = frames.beam_axis(0) * 2e-7 + frames.beam_axis(1) * (-5e-7);
    const auto tv = beam_transverse_coords(frames, v);
    CHECK(tv[0] == doctest::Approx(2e-7).epsilon(1e-12));
    CHECK(tv[1] == doctest::Approx(-5e-7).epsilon(1e-12));
    CHECK(std::sqrt(tv[0] * tv[0] + tv[1] * tv[1]) ==
          doctest::Approx(v.norm()).epsilon(1e-12));
}

TEST_CASE("wave-vector projections onto the trap modes") {
    const auto frames = FrameSet::defaults();
    const double k = TransitionSpec::defaults().wavenumber();
    const auto proj = k_projections(frames, k);

    // Propagation (z - x)/sqrt(2) against the rotated radial axes: equal
    // magnitude k/2 on both, k/sqrt(2) on the axial mode.
    CHECK(proj[0] == doctest::Approx(-0.5 * k).epsilon(1e-12));
    CHECK(proj[1] == doctest::Approx(0.5 * k).epsilon(1e-12));
    CHECK(proj[2] == doctest::Approx(k / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(proj[0]) == doctest::Approx(std::abs(proj[1])).epsilon(1e-12));
    CHECK(proj[0] * proj[0] + proj[1] * proj[1] + proj[2] * proj[2] ==
          doctest::Approx(k * k).epsilon(1e-12));
}

} // TEST_SUITE
