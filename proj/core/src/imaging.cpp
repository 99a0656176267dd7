#include "gsdscope/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsdscope/errors.hpp"
#include "gsdscope/parallel.hpp"

namespace gsdscope {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

/// Precomputed closed-form depletion response on the beam-transverse plane.
/// phi(r) collapses to a single exp per point:
///   vortex:   phi = cv * r * exp(-r^2 / w0^2)
///   gaussian: phi = cg * exp(-r^2 / w0^2)
struct DepletionResponse {
    bool vortex;
    double inv_w0_sq;
    double amp;
    double beta;

    DepletionResponse(const BeamSpec& beam, const PulseSpec& pulse, double beta_in,
                      const PhysicalConstants& pc)
        : vortex(beam.shape == BeamShape::Vortex),
          inv_w0_sq(1.0 / (beam.waist * beam.waist)),
          beta(beta_in) {
        const double lambda = beam.transition.wavelength;
        const double coupling = 3.0 * lambda * lambda * lambda * beam.transition.linewidth /
                                (4.0 * kPi * kPi * pc.hbar * pc.speed_of_light);
        const double peak = 2.0 * beam.power / (kPi * beam.waist * beam.waist);
        if (vortex) {
            // sqrt(coupling * 2 * peak / w0^2) * tau, from I = 2 r^2/w0^2 * peak envelope
            amp = std::sqrt(coupling * 2.0 * peak * inv_w0_sq) * pulse.tau;
        } else {
            amp = std::sqrt(coupling * peak) * pulse.tau;
        }
    }

    double operator()(double r_sq) const {
        const double envelope = std::exp(-r_sq * inv_w0_sq);
        const double phi = vortex ? amp * std::sqrt(r_sq) * envelope : amp * envelope;
        const double pb = phi * beta;
        return 0.5 * (1.0 - (std::cos(phi) + pb * std::sin(phi)) / (1.0 + pb * pb));
    }
};

double dephasing_beta_for(const TrapSpec& trap, const ThermalState& state, const FrameSet& frames,
                          const BeamSpec& beam, const PhysicalConstants& pc) {
    const auto kp = k_projections(frames, beam.transition.wavenumber());
    return dephasing_beta(trap, state, kp, BetaVariant::EtaSquared, pc).beta;
}

std::vector<double> gaussian_cell_weights(int n, double step, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(n));
    const double half = 0.5 * n * step;
    const double norm = step / (std::sqrt(kTwoPi) * sigma);
    for (int i = 0; i < n; ++i) {
        const double u = -half + (i + 0.5) * step;
        w[static_cast<std::size_t>(i)] = norm * std::exp(-0.5 * u * u / (sigma * sigma));
    }
    return w;
}

} // namespace

std::vector<double> AxisSpec::coords() const {
    if (pixels < 1) throw DomainError("axis pixel count must be >= 1");
    if (max < min) throw DomainError("axis range is reversed: max < min");
    std::vector<double> c(static_cast<std::size_t>(pixels));
    if (pixels == 1) {
        c[0] = 0.5 * (min + max);
        return c;
    }
    const double step = (max - min) / (pixels - 1);
    for (int i = 0; i < pixels; ++i) c[static_cast<std::size_t>(i)] = min + i * step;
    return c;
}

double epsf_sigma(double waist, double tau, double power, const TransitionSpec& transition,
                  const PhysicalConstants& pc) {
    if (waist <= 0.0) throw DomainError("waist must be positive");
    if (tau <= 0.0) throw DomainError("pulse duration must be positive");
    if (power <= 0.0) throw DomainError("power must be positive");
    const double lambda = transition.wavelength;
    const double root = std::sqrt(kPi * kPi * kPi * pc.hbar * pc.speed_of_light /
                                  (3.0 * lambda * lambda * lambda * transition.linewidth));
    return root * waist * waist / (tau * std::sqrt(power));
}

Profile epsf_profile(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                     const ThermalState& state, EpsfMode mode, double r_max, int samples,
                     const PhysicalConstants& pc) {
    if (samples < 2) throw DomainError("profile needs at least 2 samples");
    if (r_max <= 0.0) r_max = 1.5 * beam.waist;

    DephasingBeta beta{};
    if (mode == EpsfMode::ThermalClosedForm) {
        const auto frames = FrameSet::defaults();
        const auto kp = k_projections(frames, beam.transition.wavenumber());
        beta = dephasing_beta(trap, state, kp, BetaVariant::EtaSquared, pc);
    }

    Profile out;
    out.coordinate.resize(static_cast<std::size_t>(samples));
    out.value.resize(static_cast<std::size_t>(samples));
    const double step = r_max / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double r = i * step;
        const double omega = rabi_frequency(beam_intensity(r, beam), beam.transition, pc);
        out.coordinate[static_cast<std::size_t>(i)] = r;
        out.value[static_cast<std::size_t>(i)] =
            mode == EpsfMode::PointIon ? coherent_excitation(omega, pulse.tau)
                                       : thermal_excitation(omega, pulse.tau, beta);
    }
    return out;
}

double convolve_grid(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                     const ThermalState& state, const WavePacket& wp, const GridSpec& grid,
                     const FrameSet& frames, const PhysicalConstants& pc) {
    if (grid.points_per_axis < 8) throw DomainError("grid needs at least 8 points per axis");
    if (grid.extent <= 0.0) throw DomainError("grid extent must be positive");

    const int n = grid.points_per_axis;
    const double step = grid.extent / n;
    const double sigma_min = std::min({wp.sigma_x, wp.sigma_y, wp.sigma_z});
    if (step > sigma_min / 4.0) {
        std::ostringstream msg;
        msg << "grid step " << step << " m exceeds min(sigma)/4 = " << sigma_min / 4.0
            << " m; increase points_per_axis or shrink extent";
        throw AccuracyError(msg.str());
    }

    // Separable density weights along the trap axes, cell mass included.
    const auto wx = gaussian_cell_weights(n, step, wp.sigma_x);
    const auto wy = gaussian_cell_weights(n, step, wp.sigma_y);
    const auto wz = gaussian_cell_weights(n, step, wp.sigma_z);
    double mass = 0.0;
    {
        double mx = 0.0, my = 0.0, mz = 0.0;
        for (int i = 0; i < n; ++i) {
            mx += wx[static_cast<std::size_t>(i)];
            my += wy[static_cast<std::size_t>(i)];
            mz += wz[static_cast<std::size_t>(i)];
        }
        mass = mx * my * mz;
    }
    if (mass < 1.0 - 1e-3) {
        std::ostringstream msg;
        msg << "grid captures only " << mass
            << " of the density mass (deficit above 1e-3); enlarge the extent";
        throw AccuracyError(msg.str());
    }

    // Beam-transverse coordinates are affine in the grid indices: the grid is
    // aligned with the trap axes and centered on the packet.
    const Vec3 ex = frames.trap_axis(0);
    const Vec3 ey = frames.trap_axis(1);
    const Vec3 ez = frames.trap_axis(2);
    const Vec3 bx = frames.beam_axis(0);
    const Vec3 by = frames.beam_axis(1);
    const double half = 0.5 * n * step;
    const Vec3 origin = wp.center + (ex + ey + ez) * (0.5 * step - half);

    const double ax0 = origin.dot(bx) - beam.center[0];
    const double ax1 = ex.dot(bx) * step;
    const double ax2 = ey.dot(bx) * step;
    const double ax3 = ez.dot(bx) * step;
    const double ay0 = origin.dot(by) - beam.center[1];
    const double ay1 = ex.dot(by) * step;
    const double ay2 = ey.dot(by) * step;
    const double ay3 = ez.dot(by) * step;

    const DepletionResponse response(beam, pulse,
                                     dephasing_beta_for(trap, state, frames, beam, pc), pc);

    // One partial sum per x slab; slabs combine in index order afterwards so
    // the result is independent of the thread count.
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        double slab = 0.0;
        const double xi0 = ax0 + ax1 * static_cast<double>(i);
        const double yi0 = ay0 + ay1 * static_cast<double>(i);
        for (int j = 0; j < n; ++j) {
            const double xj0 = xi0 + ax2 * j;
            const double yj0 = yi0 + ay2 * j;
            double row = 0.0;
            for (int k = 0; k < n; ++k) {
                const double xb = xj0 + ax3 * k;
                const double yb = yj0 + ay3 * k;
                row += wz[static_cast<std::size_t>(k)] * response(xb * xb + yb * yb);
            }
            slab += wy[static_cast<std::size_t>(j)] * row;
        }
        partial[i] = slab;
    });

    double total = 0.0;
    for (int i = 0; i < n; ++i) total += wx[static_cast<std::size_t>(i)] * partial[static_cast<std::size_t>(i)];
    return total / mass;
}

McEstimate mc_convolve(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                       const ThermalState& state, const WavePacket& wp, const FrameSet& frames,
                       std::size_t samples, std::uint64_t seed, const PhysicalConstants& pc) {
    if (samples < 2) throw DomainError("Monte-Carlo needs at least 2 samples");

    const DepletionResponse response(beam, pulse,
                                     dephasing_beta_for(trap, state, frames, beam, pc), pc);
    const Vec3 ex = frames.trap_axis(0);
    const Vec3 ey = frames.trap_axis(1);
    const Vec3 ez = frames.trap_axis(2);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec3 point = wp.center + ex * (wp.sigma_x * unit(rng)) +
                           ey * (wp.sigma_y * unit(rng)) + ez * (wp.sigma_z * unit(rng));
        const auto tv = beam_transverse_coords(frames, point);
        const double xb = tv[0] - beam.center[0];
        const double yb = tv[1] - beam.center[1];
        const double p = response(xb * xb + yb * yb);
        const double delta = p - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (p - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

ImageGrid scan_image(const ScanSpec& scan, const BeamSpec& beam, const PulseSpec& pulse,
                     const TrapSpec& trap, const ThermalState& state, const GridSpec& grid,
                     const FrameSet& frames, const PhysicalConstants& pc) {
    ImageGrid image;
    image.axis_a = scan.axis_a.coords();
    image.axis_b = scan.axis_b.coords();
    const std::size_t na = image.axis_a.size();
    const std::size_t nb = image.axis_b.size();
    image.values.assign(na * nb, 0.0);

    const WavePacket wp0 = thermal_wavepacket(trap, state, Vec3{0.0, 0.0, 0.0}, pc);
    const Vec3 ion_axis = frames.trap_axis(2);

    parallel_for(na * nb, [&](std::size_t p) {
        const std::size_t bi = p / na;
        const std::size_t ai = p % na;
        BeamSpec moved = beam;
        moved.center[1] += image.axis_a[ai];
        WavePacket wp = wp0;
        wp.center = wp0.center + ion_axis * image.axis_b[bi];
        image.values[p] = convolve_grid(moved, pulse, trap, state, wp, grid, frames, pc);
    });

    nlohmann::json prov;
    prov["generator"] = "gsdscope scan";
    prov["beam"] = {{"shape", beam.shape == BeamShape::Vortex ? "vortex" : "gaussian"},
                    {"power_w", beam.power},
                    {"waist_m", beam.waist},
                    {"center_m", {beam.center[0], beam.center[1]}}};
    prov["transition"] = {{"wavelength_m", beam.transition.wavelength},
                          {"linewidth_rad_s", beam.transition.linewidth}};
    prov["pulse"] = {{"tau_s", pulse.tau}};
    prov["trap"] = {{"mass_kg", trap.mass},
                    {"omega_rad_s", {trap.omega_x, trap.omega_y, trap.omega_z}}};
    prov["state"] = {{"nbar", {state.nbar_x, state.nbar_y, state.nbar_z}}};
    prov["grid"] = {{"points_per_axis", grid.points_per_axis}, {"extent_m", grid.extent}};
    prov["scan"] = {{"axis_a", {{"min", scan.axis_a.min}, {"max", scan.axis_a.max}, {"pixels", scan.axis_a.pixels}}},
                    {"axis_b", {{"min", scan.axis_b.min}, {"max", scan.axis_b.max}, {"pixels", scan.axis_b.pixels}}}};
    image.provenance = prov.dump(2);
    return image;
}

Profile profile_cut(const ImageGrid& image, const std::vector<int>& rows) {
    if (rows.empty()) throw DomainError("profile cut needs at least one row");
    const std::size_t na = image.axis_a.size();
    const std::size_t nb = image.axis_b.size();
    for (int r : rows) {
        if (r < 0 || static_cast<std::size_t>(r) >= nb)
            throw DomainError("profile cut row index out of range");
    }

    Profile out;
    out.coordinate = image.axis_a;
    out.value.resize(na);
    const double nr = static_cast<double>(rows.size());
    for (std::size_t a = 0; a < na; ++a) {
        double sum = 0.0;
        for (int r : rows) sum += image.at(a, static_cast<std::size_t>(r));
        out.value[a] = sum / nr;
    }
    if (rows.size() >= 2) {
        out.sigma.resize(na);
        for (std::size_t a = 0; a < na; ++a) {
            double ss = 0.0;
            for (int r : rows) {
                const double d = image.at(a, static_cast<std::size_t>(r)) - out.value[a];
                ss += d * d;
            }
            out.sigma[a] = std::sqrt(ss / (nr - 1.0) / nr);
        }
    }
    return out;
}

} // namespace gsdscope
