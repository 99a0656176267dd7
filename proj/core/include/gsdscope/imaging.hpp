#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsdscope/beam.hpp"
#include "gsdscope/dynamics.hpp"
#include "gsdscope/wavepacket.hpp"

namespace gsdscope {

/// Cubic integration grid centered on the wave packet, cell-centered points.
struct GridSpec {
    int points_per_axis = 128;  ///< test default; publication runs use 512
    double extent = 1e-6;       ///< full side length [m]

    static GridSpec publication() { return {512, 1e-6}; }
};

/// One scan axis: inclusive coordinate range and pixel count.
struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    int pixels = 1;

    std::vector<double> coords() const;
};

/// Raster scan: axis_a displaces the beam along its transverse y axis,
/// axis_b displaces the ion along the trap z axis.
struct ScanSpec {
    AxisSpec axis_a;
    AxisSpec axis_b;
};

/// Sampled 1D curve; `sigma` is empty when uncertainties are unknown.
struct Profile {
    std::vector<double> coordinate;  ///< [m] (or generic abscissa)
    std::vector<double> value;
    std::vector<double> sigma;
};

/// Raster-scan result. Values are stored row-major with axis_b as rows:
/// value(a, b) = values[b * axis_a.size() + a]. All values lie in [0, 1].
struct ImageGrid {
    std::vector<double> axis_a;  ///< beam displacement coordinates [m]
    std::vector<double> axis_b;  ///< ion displacement coordinates [m]
    std::vector<double> values;
    std::string provenance;      ///< JSON record of the generating inputs

    double at(std::size_t a, std::size_t b) const { return values[b * axis_a.size() + a]; }
};

/// How the ion responds in an effective point-spread-function profile.
enum class EpsfMode {
    PointIon,           ///< coherent two-level response at the ion position
    ThermalClosedForm,  ///< motional-dephasing closed form
};

/// Characteristic radius of the depletion response: the transverse distance
/// at which the accumulated Rabi phase of the near-axis doughnut reaches
/// 1 rad, sigma = sqrt(pi^3 hbar c / (3 lambda^3 gamma)) * w0^2/(tau sqrt(P0)).
/// Shrinks with sqrt(P0), giving resolution below the optical waist.
double epsf_sigma(double waist, double tau, double power, const TransitionSpec& transition,
                  const PhysicalConstants& pc = PhysicalConstants{});

/// Depletion probability versus transverse distance from the beam axis.
/// ThermalClosedForm uses the default frame geometry for the wave-vector
/// projections. r_max <= 0 selects 1.5 * waist.
Profile epsf_profile(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                     const ThermalState& state, EpsfMode mode, double r_max = 0.0,
                     int samples = 241,
                     const PhysicalConstants& pc = PhysicalConstants{});

/// Depletion probability averaged over the wave packet: the grid sum of
/// density * P_D(beam-transverse coords) * cell volume, with the density
/// renormalized on the grid and cells visited in lexicographic order.
/// Throws AccuracyError when the step exceeds min(sigma)/4 or when more than
/// 1e-3 of the density mass falls outside the grid.
double convolve_grid(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                     const ThermalState& state, const WavePacket& wp, const GridSpec& grid,
                     const FrameSet& frames,
                     const PhysicalConstants& pc = PhysicalConstants{});

/// Monte-Carlo estimate with standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo reference for convolve_grid: the mean of the thermal
/// excitation over Gaussian-sampled ion positions. Deterministic for a
/// fixed seed within one build.
McEstimate mc_convolve(const BeamSpec& beam, const PulseSpec& pulse, const TrapSpec& trap,
                       const ThermalState& state, const WavePacket& wp, const FrameSet& frames,
                       std::size_t samples, std::uint64_t seed,
                       const PhysicalConstants& pc = PhysicalConstants{});

/// Raster scan of beam (axis_a, along y_B) against ion (axis_b, along z_t);
/// each pixel is one convolve_grid evaluation. Pixels are independent and
/// evaluated concurrently; results do not depend on the schedule.
ImageGrid scan_image(const ScanSpec& scan, const BeamSpec& beam, const PulseSpec& pulse,
                     const TrapSpec& trap, const ThermalState& state, const GridSpec& grid,
                     const FrameSet& frames,
                     const PhysicalConstants& pc = PhysicalConstants{});

/// Horizontal cut through an image: the selected rows (axis_b indices) are
/// averaged per column. One row is returned verbatim; two or more attach the
/// standard error of the row mean.
Profile profile_cut(const ImageGrid& image, const std::vector<int>& rows);

} // namespace gsdscope
