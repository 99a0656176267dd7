#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gsdscope/imaging.hpp"

namespace gsdscope {

/// One fit parameter with its search box. The initial value must lie inside
/// [lower, upper]; iterates are clipped to the box.
struct FreeParam {
    std::string name;
    double init = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Maps a parameter vector (ordered as the FreeParam list) to model values
/// at every data point.
using ModelFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct LsqOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-4;   ///< scaled-gradient threshold, see least_squares
    double lambda_init = 1e-3;
    double lambda_max = 1e12;
    bool multistart = true;
    int max_extra_starts = 3;     ///< additional starts tried on non-convergence
};

struct FitResult {
    std::map<std::string, double> estimates;
    std::map<std::string, double> uncertainties;
    double residual_rms = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> cost_trace;  ///< weighted SSR after each accepted step
};

/// Damped Gauss-Newton least squares with box clipping and numeric forward
/// differences. `converged` is set only by the gradient criterion
/// max_j |g_j| * span_j <= gradient_tol * (1 + cost); hitting the iteration
/// cap or a damping stall leaves it false. With multistart enabled the
/// candidate starts are the cartesian offsets {0, +0.3, -0.3} * span around
/// the inits, ranked by initial cost; the best-ranked start is refined first
/// and further ones only on non-convergence. Uncertainties come from the
/// curvature at the solution scaled by the reduced chi-square; a singular
/// curvature throws FitError naming the most collinear parameter pair.
FitResult least_squares(const ModelFn& model, const std::vector<FreeParam>& params,
                        const std::vector<double>& y, const std::vector<double>& sigma = {},
                        const LsqOptions& opts = {});

/// Inputs shared by every profile-model evaluation. `beam.center[1]` is the
/// reference displacement; the fit coordinate x displaces the beam by
/// (x - center) from it along the transverse y axis.
struct GsdModelContext {
    BeamSpec beam{BeamShape::Vortex, 1.2e-3, 4.2e-6};
    PulseSpec pulse = PulseSpec::defaults();
    TrapSpec trap = TrapSpec::defaults();
    ThermalState state = ThermalState::defaults();
    GridSpec grid;
    FrameSet frames = FrameSet::defaults();
    bool convolve = true;  ///< false: closed-form response of a point ion
    PhysicalConstants pc{};
};

/// Depletion-profile model over coordinates `x`. Recognized parameter names:
///   "p0"      beam power [W]
///   "center"  profile center [m]
///   "nbar_z"  axial occupancy (wave packet and dephasing follow it)
///   "sigma_z" axial packet width [m] (dephasing stays at the context state)
/// Anything else throws ConfigError. Parameters not listed stay at their
/// context values.
ModelFn gsd_profile_model(const GsdModelContext& ctx, const std::vector<std::string>& names,
                          const std::vector<double>& x);

/// amplitude * hwhm^2 / ((x - center)^2 + hwhm^2) + offset
double lorentzian(double x, double amplitude, double center, double hwhm, double offset);

/// Fits a Lorentzian peak with data-driven starting values. Parameters are
/// named "amplitude", "center", "hwhm", "offset".
FitResult fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& sigma = {}, const LsqOptions& opts = {});

} // namespace gsdscope
