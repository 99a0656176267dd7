#include "gsdscope/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsdscope/errors.hpp"

namespace gsdscope {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("unknown config key \"" + path + key + "\"");
    }
}

/// Number (already SI) or unit string checked against the expected dimension.
double qty(const json& v, Unit expected, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_quantity_as(v.get<std::string>(), expected);
        } catch (const ParseError& e) {
            throw ConfigError("config key \"" + path + "\": " + e.what());
        }
    }
    throw ConfigError("config key \"" + path + "\" must be a number or a unit string");
}

/// Angular frequency: numbers are rad/s, strings in Hz gain a factor 2 pi.
double angular_qty(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        Quantity q;
        try {
            q = parse_quantity(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ConfigError("config key \"" + path + "\": " + e.what());
        }
        if (q.unit == Unit::RadiansPerSecond) return q.value;
        if (q.unit == Unit::Hertz) return q.value * 6.283185307179586;
        throw ConfigError("config key \"" + path + "\" must be a frequency");
    }
    throw ConfigError("config key \"" + path + "\" must be a number or a unit string");
}

/// Magnitude with any unit; fit parameter boxes carry their own dimensions.
double loose_qty(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_quantity(v.get<std::string>()).value;
        } catch (const ParseError& e) {
            throw ConfigError("config key \"" + path + "\": " + e.what());
        }
    }
    throw ConfigError("config key \"" + path + "\" must be a number or a unit string");
}

double plain_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("config key \"" + path + "\" must be a number");
    return v.get<double>();
}

AxisSpec parse_axis(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError("config key \"" + path + "\" must be an object");
    check_keys(v, path + ".", {"min", "max", "pixels"});
    AxisSpec axis;
    if (v.contains("min")) axis.min = qty(v.at("min"), Unit::Meter, path + ".min");
    if (v.contains("max")) axis.max = qty(v.at("max"), Unit::Meter, path + ".max");
    if (v.contains("pixels")) {
        if (!v.at("pixels").is_number_integer())
            throw ConfigError("config key \"" + path + ".pixels\" must be an integer");
        axis.pixels = v.at("pixels").get<int>();
    }
    return axis;
}

/// Row-major 3x3 matrix: either three rows of three numbers or a flat
/// array of nine.
Mat3 parse_mat3(const json& v, const std::string& path) {
    Mat3 m{};
    if (v.is_array() && v.size() == 3 && v.at(0).is_array()) {
        for (int r = 0; r < 3; ++r) {
            const auto& row = v.at(r);
            if (!row.is_array() || row.size() != 3)
                throw ConfigError("config key \"" + path + "\" must be a 3x3 matrix");
            for (int c = 0; c < 3; ++c)
                m.m[r][c] = plain_number(row.at(c), path);
        }
        return m;
    }
    if (v.is_array() && v.size() == 9) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                m.m[r][c] = plain_number(v.at(3 * r + c), path);
        return m;
    }
    throw ConfigError("config key \"" + path +
                      "\" must be a 3x3 matrix (nested rows or 9 row-major numbers)");
}

RunConfig parse_config_tree(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(root, "", {"constants", "transition", "trap", "state", "beam", "pulse", "frames",
                          "grid", "scan", "fit", "budget", "seed", "output"});

    RunConfig cfg;

    if (root.contains("constants")) {
        const auto& c = root.at("constants");
        check_keys(c, "constants.", {"hbar", "c", "atomic_mass_unit", "euler"});
        if (c.contains("hbar")) cfg.constants.hbar = plain_number(c.at("hbar"), "constants.hbar");
        if (c.contains("c"))
            cfg.constants.speed_of_light = plain_number(c.at("c"), "constants.c");
        if (c.contains("atomic_mass_unit"))
            cfg.constants.atomic_mass_unit =
                plain_number(c.at("atomic_mass_unit"), "constants.atomic_mass_unit");
        if (c.contains("euler")) cfg.constants.euler = plain_number(c.at("euler"), "constants.euler");
        if (cfg.constants.hbar <= 0.0 || cfg.constants.speed_of_light <= 0.0 ||
            cfg.constants.atomic_mass_unit <= 0.0 || cfg.constants.euler <= 0.0)
            throw ConfigError("config: physical constants must be positive");
    }

    if (root.contains("transition")) {
        const auto& t = root.at("transition");
        check_keys(t, "transition.", {"wavelength", "lifetime", "linewidth"});
        double wl = cfg.transition.wavelength;
        double lw = cfg.transition.linewidth;
        if (t.contains("wavelength"))
            wl = qty(t.at("wavelength"), Unit::Meter, "transition.wavelength");
        if (t.contains("lifetime") && t.contains("linewidth"))
            throw ConfigError("config: give transition.lifetime or transition.linewidth, not both");
        if (t.contains("lifetime"))
            lw = gamma_from_lifetime(qty(t.at("lifetime"), Unit::Second, "transition.lifetime"));
        if (t.contains("linewidth"))
            lw = qty(t.at("linewidth"), Unit::Hertz, "transition.linewidth");
        cfg.transition = TransitionSpec(wl, lw);
    }

    if (root.contains("trap")) {
        const auto& t = root.at("trap");
        check_keys(t, "trap.", {"mass_amu", "mass_kg", "omega_x", "omega_y", "omega_z"});
        double mass = cfg.trap.mass;
        if (t.contains("mass_amu") && t.contains("mass_kg"))
            throw ConfigError("config: give trap.mass_amu or trap.mass_kg, not both");
        if (t.contains("mass_amu"))
            mass = plain_number(t.at("mass_amu"), "trap.mass_amu") *
                   cfg.constants.atomic_mass_unit;
        if (t.contains("mass_kg")) mass = plain_number(t.at("mass_kg"), "trap.mass_kg");
        double ox = cfg.trap.omega_x, oy = cfg.trap.omega_y, oz = cfg.trap.omega_z;
        if (t.contains("omega_x")) ox = angular_qty(t.at("omega_x"), "trap.omega_x");
        if (t.contains("omega_y")) oy = angular_qty(t.at("omega_y"), "trap.omega_y");
        if (t.contains("omega_z")) oz = angular_qty(t.at("omega_z"), "trap.omega_z");
        cfg.trap = TrapSpec(mass, ox, oy, oz);
    }

    if (root.contains("state")) {
        const auto& s = root.at("state");
        check_keys(s, "state.", {"nbar_x", "nbar_y", "nbar_z"});
        double nx = cfg.state.nbar_x, ny = cfg.state.nbar_y, nz = cfg.state.nbar_z;
        if (s.contains("nbar_x")) nx = plain_number(s.at("nbar_x"), "state.nbar_x");
        if (s.contains("nbar_y")) ny = plain_number(s.at("nbar_y"), "state.nbar_y");
        if (s.contains("nbar_z")) nz = plain_number(s.at("nbar_z"), "state.nbar_z");
        cfg.state = ThermalState(nx, ny, nz);
    }

    {
        BeamShape shape = cfg.beam.shape;
        double power = cfg.beam.power;
        double waist = cfg.beam.waist;
        std::array<double, 2> center = cfg.beam.center;
        if (root.contains("beam")) {
            const auto& b = root.at("beam");
            check_keys(b, "beam.", {"shape", "power", "waist", "center"});
            if (b.contains("shape")) {
                const std::string s = b.at("shape").get<std::string>();
                if (s == "vortex") shape = BeamShape::Vortex;
                else if (s == "gaussian") shape = BeamShape::Gaussian;
                else throw ConfigError("config key \"beam.shape\" must be \"vortex\" or \"gaussian\"");
            }
            if (b.contains("power")) power = qty(b.at("power"), Unit::Watt, "beam.power");
            if (b.contains("waist")) waist = qty(b.at("waist"), Unit::Meter, "beam.waist");
            if (b.contains("center")) {
                const auto& c = b.at("center");
                if (!c.is_array() || c.size() != 2)
                    throw ConfigError("config key \"beam.center\" must be an array of 2 values");
                center[0] = qty(c.at(0), Unit::Meter, "beam.center[0]");
                center[1] = qty(c.at(1), Unit::Meter, "beam.center[1]");
            }
        }
        cfg.beam = BeamSpec(shape, power, waist, center, cfg.transition);
    }

    if (root.contains("pulse")) {
        const auto& p = root.at("pulse");
        check_keys(p, "pulse.", {"tau"});
        double tau = cfg.pulse.tau;
        if (p.contains("tau")) tau = qty(p.at("tau"), Unit::Second, "pulse.tau");
        cfg.pulse = PulseSpec(tau);
    }

    if (root.contains("frames")) {
        const auto& f = root.at("frames");
        check_keys(f, "frames.", {"preset", "trap_to_lab", "beam_to_lab"});
        if (f.contains("preset")) {
            if (f.contains("trap_to_lab") || f.contains("beam_to_lab"))
                throw ConfigError("config: give frames.preset or explicit matrices, not both");
            if (f.at("preset").get<std::string>() != "default")
                throw ConfigError("config key \"frames.preset\" supports only \"default\"");
        } else if (f.contains("trap_to_lab") || f.contains("beam_to_lab")) {
            Mat3 trap_to_lab = cfg.frames.trap_to_lab;
            Mat3 beam_to_lab = cfg.frames.beam_to_lab;
            if (f.contains("trap_to_lab"))
                trap_to_lab = parse_mat3(f.at("trap_to_lab"), "frames.trap_to_lab");
            if (f.contains("beam_to_lab"))
                beam_to_lab = parse_mat3(f.at("beam_to_lab"), "frames.beam_to_lab");
            try {
                cfg.frames = FrameSet(trap_to_lab, beam_to_lab);
            } catch (const DomainError& e) {
                throw ConfigError(std::string("config key \"frames\": ") + e.what());
            }
        }
    }

    if (root.contains("grid")) {
        const auto& g = root.at("grid");
        check_keys(g, "grid.", {"points_per_axis", "extent"});
        if (g.contains("points_per_axis")) {
            if (!g.at("points_per_axis").is_number_integer())
                throw ConfigError("config key \"grid.points_per_axis\" must be an integer");
            cfg.grid.points_per_axis = g.at("points_per_axis").get<int>();
        }
        if (g.contains("extent"))
            cfg.grid.extent = qty(g.at("extent"), Unit::Meter, "grid.extent");
    }

    if (root.contains("scan")) {
        const auto& s = root.at("scan");
        check_keys(s, "scan.", {"axis_a", "axis_b"});
        if (s.contains("axis_a")) cfg.scan.axis_a = parse_axis(s.at("axis_a"), "scan.axis_a");
        if (s.contains("axis_b")) cfg.scan.axis_b = parse_axis(s.at("axis_b"), "scan.axis_b");
    }

    if (root.contains("fit")) {
        const auto& f = root.at("fit");
        check_keys(f, "fit.", {"model", "convolve", "data", "params"});
        if (f.contains("model")) {
            cfg.fit.model = f.at("model").get<std::string>();
            if (cfg.fit.model != "gsd_profile" && cfg.fit.model != "lorentzian")
                throw ConfigError(
                    "config key \"fit.model\" must be \"gsd_profile\" or \"lorentzian\"");
        }
        if (f.contains("convolve")) {
            if (!f.at("convolve").is_boolean())
                throw ConfigError("config key \"fit.convolve\" must be a boolean");
            cfg.fit.convolve = f.at("convolve").get<bool>();
        }
        if (f.contains("data")) cfg.fit.data = f.at("data").get<std::string>();
        if (f.contains("params")) {
            const auto& arr = f.at("params");
            if (!arr.is_array()) throw ConfigError("config key \"fit.params\" must be an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "fit.params[" + std::to_string(i) + "]";
                const auto& p = arr.at(i);
                if (!p.is_object()) throw ConfigError("config key \"" + path + "\" must be an object");
                check_keys(p, path + ".", {"name", "init", "lower", "upper"});
                FreeParam fp;
                if (!p.contains("name") || !p.contains("init") || !p.contains("lower") ||
                    !p.contains("upper"))
                    throw ConfigError("config key \"" + path +
                                      "\" needs name, init, lower and upper");
                fp.name = p.at("name").get<std::string>();
                fp.init = loose_qty(p.at("init"), path + ".init");
                fp.lower = loose_qty(p.at("lower"), path + ".lower");
                fp.upper = loose_qty(p.at("upper"), path + ".upper");
                cfg.fit.params.push_back(fp);
            }
        }
    }

    cfg.setup.waist = cfg.beam.waist;
    cfg.setup.tau = cfg.pulse.tau;
    cfg.setup.transition = cfg.transition;

    if (root.contains("budget")) {
        const auto& b = root.at("budget");
        check_keys(b, "budget.",
                   {"p_max", "theta_b", "theta_b_deg", "gamma_pol", "pol_error", "delta",
                    "leakage_factor"});
        if (b.contains("p_max")) cfg.budget_p_max = plain_number(b.at("p_max"), "budget.p_max");
        if (b.contains("theta_b") && b.contains("theta_b_deg"))
            throw ConfigError("config: give budget.theta_b or budget.theta_b_deg, not both");
        if (b.contains("theta_b"))
            cfg.setup.theta_b = plain_number(b.at("theta_b"), "budget.theta_b");
        if (b.contains("theta_b_deg"))
            cfg.setup.theta_b = plain_number(b.at("theta_b_deg"), "budget.theta_b_deg") *
                                0.017453292519943295;
        if (b.contains("gamma_pol"))
            cfg.setup.gamma_pol = plain_number(b.at("gamma_pol"), "budget.gamma_pol");
        if (b.contains("pol_error"))
            cfg.setup.pol_error = plain_number(b.at("pol_error"), "budget.pol_error");
        if (b.contains("delta")) cfg.setup.delta = angular_qty(b.at("delta"), "budget.delta");
        if (b.contains("leakage_factor"))
            cfg.setup.leakage_factor = plain_number(b.at("leakage_factor"), "budget.leakage_factor");
    }

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_integer())
            throw ConfigError("config key \"seed\" must be an integer");
        cfg.seed = root.at("seed").get<std::uint64_t>();
    }

    if (root.contains("output")) {
        const auto& o = root.at("output");
        check_keys(o, "output.", {"prefix"});
        if (o.contains("prefix")) cfg.output_prefix = o.at("prefix").get<std::string>();
    }

    return cfg;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config_tree(root);
    } catch (const json::exception& e) {
        // Values of the wrong JSON type (an object where a string belongs, etc.)
        // are a config-file problem, not an internal failure.
        throw ParseError(std::string("config has a malformed value: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

// ----------------------------------------------------------------------------
// Text files
// ----------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open \"" + path + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw ParseError("failed writing \"" + path + "\"");
}

namespace {

/// Splits one CSV line; no quoting, plain comma separation.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& token, const std::string& path, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        while (used < token.size() && (token[used] == ' ' || token[used] == '\r')) ++used;
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("\"" + path + "\" line " + std::to_string(line_no) +
                         ": bad number \"" + token + "\"");
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string::npos) pos = text.size();
        std::string line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (pos == text.size()) break;
        start = pos + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

} // namespace

void write_profile_csv(const std::string& path, const Profile& profile) {
    if (profile.coordinate.size() != profile.value.size())
        throw DomainError("profile coordinate/value lengths differ");
    const bool with_sigma = !profile.sigma.empty();
    if (with_sigma && profile.sigma.size() != profile.value.size())
        throw DomainError("profile sigma length differs from values");
    std::ostringstream out;
    out << "# gsdscope profile v1\n";
    out << (with_sigma ? "coord_m,p_d,sigma_p\n" : "coord_m,p_d\n");
    for (std::size_t i = 0; i < profile.value.size(); ++i) {
        out << fmt17(profile.coordinate[i]) << ',' << fmt17(profile.value[i]);
        if (with_sigma) out << ',' << fmt17(profile.sigma[i]);
        out << '\n';
    }
    write_text_file(path, out.str());
}

Profile read_profile_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2 || lines[0] != "# gsdscope profile v1")
        throw ParseError("\"" + path + "\" is not a profile file (bad magic line)");
    bool with_sigma = false;
    if (lines[1] == "coord_m,p_d,sigma_p") with_sigma = true;
    else if (lines[1] != "coord_m,p_d")
        throw ParseError("\"" + path + "\" has an unexpected column header");

    Profile profile;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split_csv(lines[i]);
        if (cols.size() != (with_sigma ? 3u : 2u))
            throw ParseError("\"" + path + "\" line " + std::to_string(i + 1) +
                             ": wrong column count");
        profile.coordinate.push_back(parse_double(cols[0], path, i + 1));
        profile.value.push_back(parse_double(cols[1], path, i + 1));
        if (with_sigma) profile.sigma.push_back(parse_double(cols[2], path, i + 1));
    }
    if (profile.value.size() < 2)
        throw ParseError("\"" + path + "\" needs at least 2 data rows");
    const bool ascending = profile.coordinate[1] > profile.coordinate[0];
    for (std::size_t i = 0; i + 1 < profile.coordinate.size(); ++i) {
        const bool step_up = profile.coordinate[i + 1] > profile.coordinate[i];
        if (profile.coordinate[i + 1] == profile.coordinate[i] || step_up != ascending)
            throw ParseError("\"" + path + "\" coordinates must be strictly monotone");
    }
    for (std::size_t i = 0; i < profile.value.size(); ++i) {
        if (profile.value[i] < 0.0 || profile.value[i] > 1.0)
            throw ParseError("\"" + path + "\" probabilities must lie in [0, 1]");
        if (with_sigma && profile.sigma[i] <= 0.0)
            throw ParseError("\"" + path + "\" sigma column must be positive");
    }
    return profile;
}

void write_image_csv(const std::string& path, const ImageGrid& image) {
    const std::size_t na = image.axis_a.size();
    const std::size_t nb = image.axis_b.size();
    if (image.values.size() != na * nb) throw DomainError("image value count does not match axes");
    std::ostringstream out;
    out << "# gsdscope image v1\n";
    out << "y_B_m,z_t_m,p_d\n";
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t a = 0; a < na; ++a)
            out << fmt17(image.axis_a[a]) << ',' << fmt17(image.axis_b[b]) << ','
                << fmt17(image.values[b * na + a]) << '\n';
    write_text_file(path, out.str());
}

ImageGrid read_image_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2 || lines[0] != "# gsdscope image v1")
        throw ParseError("\"" + path + "\" is not an image file (bad magic line)");
    if (lines[1] != "y_B_m,z_t_m,p_d")
        throw ParseError("\"" + path + "\" has an unexpected column header");

    std::vector<double> a_col, b_col, v_col;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split_csv(lines[i]);
        if (cols.size() != 3)
            throw ParseError("\"" + path + "\" line " + std::to_string(i + 1) +
                             ": wrong column count");
        a_col.push_back(parse_double(cols[0], path, i + 1));
        b_col.push_back(parse_double(cols[1], path, i + 1));
        v_col.push_back(parse_double(cols[2], path, i + 1));
    }
    if (v_col.empty()) throw ParseError("\"" + path + "\" contains no data rows");

    ImageGrid image;
    image.axis_a.push_back(a_col[0]);
    std::size_t na = 1;
    while (na < a_col.size() && !(a_col[na] == a_col[0] && b_col[na] != b_col[0])) {
        image.axis_a.push_back(a_col[na]);
        ++na;
    }
    if (v_col.size() % na != 0)
        throw ParseError("\"" + path + "\" rows do not form a complete grid");
    const std::size_t nb = v_col.size() / na;
    for (std::size_t b = 0; b < nb; ++b) image.axis_b.push_back(b_col[b * na]);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t a = 0; a < na; ++a) {
            const std::size_t row = b * na + a;
            if (a_col[row] != image.axis_a[a] || b_col[row] != image.axis_b[b])
                throw ParseError("\"" + path + "\" grid coordinates are not consistent");
        }
    image.values = std::move(v_col);
    return image;
}

void write_image_pgm(const std::string& path, const ImageGrid& image) {
    const std::size_t na = image.axis_a.size();
    const std::size_t nb = image.axis_b.size();
    if (image.values.size() != na * nb) throw DomainError("image value count does not match axes");
    std::ostringstream out;
    out << "P2\n# gsdscope image\n" << na << ' ' << nb << "\n255\n";
    for (std::size_t b = nb; b-- > 0;) {
        for (std::size_t a = 0; a < na; ++a) {
            double v = image.values[b * na + a];
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            out << static_cast<int>(v * 255.0 + 0.5);
            out << (a + 1 == na ? '\n' : ' ');
        }
    }
    write_text_file(path, out.str());
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
    if (spectrum.detuning.size() != spectrum.p.size() ||
        spectrum.detuning.size() != spectrum.shots.size())
        throw DomainError("spectrum column lengths differ");
    std::ostringstream out;
    out << "# gsdscope spectrum v1\n";
    out << "detuning_hz,p_d,shots\n";
    for (std::size_t i = 0; i < spectrum.p.size(); ++i)
        out << fmt17(spectrum.detuning[i]) << ',' << fmt17(spectrum.p[i]) << ','
            << spectrum.shots[i] << '\n';
    write_text_file(path, out.str());
}

Spectrum read_spectrum_csv(const std::string& path) {
    const auto lines = read_lines(path);
    // Leading comment lines (the writer's magic line among them) are skipped;
    // only the column header is required.
    std::size_t first = 0;
    while (first < lines.size() && (lines[first].empty() || lines[first][0] == '#')) ++first;
    if (first >= lines.size() || lines[first] != "detuning_hz,p_d,shots")
        throw ParseError("\"" + path + "\" has an unexpected column header");
    Spectrum s;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split_csv(lines[i]);
        if (cols.size() != 3)
            throw ParseError("\"" + path + "\" line " + std::to_string(i + 1) +
                             ": wrong column count");
        s.detuning.push_back(parse_double(cols[0], path, i + 1));
        s.p.push_back(parse_double(cols[1], path, i + 1));
        s.shots.push_back(static_cast<long>(parse_double(cols[2], path, i + 1)));
    }
    if (s.p.empty()) throw ParseError("\"" + path + "\" contains no data rows");
    return s;
}

std::vector<double> add_shot_noise(const std::vector<double>& p, long shots,
                                   std::uint64_t seed) {
    if (shots < 1) throw DomainError("shot count must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double q = p[i];
        if (q < 0.0 || q > 1.0)
            throw DomainError("shot noise needs probabilities in [0, 1]");
        std::binomial_distribution<long> dist(shots, q);
        out[i] = static_cast<double>(dist(rng)) / static_cast<double>(shots);
    }
    return out;
}

std::string fit_result_json(const FitResult& result,
                            const std::map<std::string, double>& derived) {
    json j;
    j["estimates"] = result.estimates;
    j["uncertainties"] = result.uncertainties;
    j["residual_rms"] = result.residual_rms;
    j["converged"] = result.converged;
    if (!derived.empty()) j["derived"] = derived;
    return j.dump(2) + "\n";
}

} // namespace gsdscope
