#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsdscope/budget.hpp"
#include "gsdscope/fit.hpp"

namespace gsdscope {

/// Fit task description loaded from a config file.
struct FitConfig {
    std::string model = "gsd_profile";  ///< "gsd_profile" or "lorentzian"
    bool convolve = true;
    std::vector<FreeParam> params;
    std::string data;  ///< path of the input CSV (profile or spectrum)
};

/// Complete run description. Defaults reproduce the reference setup; JSON
/// sections override individual fields.
struct RunConfig {
    PhysicalConstants constants{};
    TransitionSpec transition = TransitionSpec::defaults();
    TrapSpec trap = TrapSpec::defaults();
    ThermalState state = ThermalState::defaults();
    BeamSpec beam{BeamShape::Vortex, 1.2e-3, 4.2e-6};
    PulseSpec pulse = PulseSpec::defaults();
    FrameSet frames = FrameSet::defaults();
    GridSpec grid{};
    ScanSpec scan{{-1e-6, 1e-6, 21}, {-1e-6, 1e-6, 21}};
    FitConfig fit{};
    SetupSpec setup{};           ///< synced to beam/pulse, budget keys override
    double budget_p_max = 0.01;  ///< spurious-excitation cap for the limit table
    std::uint64_t seed = 1;
    std::string output_prefix = "gsdscope";
};

/// Parses a JSON config. Quantities are numbers in SI or unit strings
/// ("4.2um", "19us", "2pi*760kHz"); angular frequencies given in Hz are
/// multiplied by 2 pi. Unknown keys anywhere throw ConfigError naming the
/// full key path. Invalid JSON throws ParseError.
RunConfig parse_config(const std::string& json_text);

/// parse_config on the contents of `path`.
RunConfig load_config(const std::string& path);

// ----------------------------------------------------------------------------
// CSV and PGM formats. Numbers are written with round-trip precision, so
// write followed by read reproduces the values bit for bit.
// ----------------------------------------------------------------------------

/// Header "# gsdscope profile v1", columns coord_m,p_d[,sigma_p].
void write_profile_csv(const std::string& path, const Profile& profile);
Profile read_profile_csv(const std::string& path);

/// Header "# gsdscope image v1", columns y_B_m,z_t_m,p_d, axis_b as the
/// outer loop. Provenance travels in a sidecar, not in the CSV.
void write_image_csv(const std::string& path, const ImageGrid& image);
ImageGrid read_image_csv(const std::string& path);

/// Plain-text PGM (P2), one pixel per image value, grey = round(255 * p),
/// top row = highest axis_b coordinate.
void write_image_pgm(const std::string& path, const ImageGrid& image);

/// Sideband spectrum: excitation probability versus detuning.
struct Spectrum {
    std::vector<double> detuning;  ///< [Hz]
    std::vector<double> p;
    std::vector<long> shots;
};

/// Header "# gsdscope spectrum v1", columns detuning_hz,p_d,shots.
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum);
Spectrum read_spectrum_csv(const std::string& path);

/// Replaces each probability with the mean of `shots` Bernoulli draws.
/// Deterministic per seed; p = 0 and p = 1 are fixed points.
std::vector<double> add_shot_noise(const std::vector<double>& p, long shots,
                                   std::uint64_t seed);

/// JSON object with keys "estimates", "uncertainties", "residual_rms",
/// "converged", plus "derived" when extra values are supplied.
std::string fit_result_json(const FitResult& result,
                            const std::map<std::string, double>& derived = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace gsdscope
