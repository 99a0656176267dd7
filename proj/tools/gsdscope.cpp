// Command line front end: profiles, raster scans, fits, sideband
// thermometry and the saturation budget, all driven by a JSON config plus
// flag overrides. Exit codes: 0 success, 2 bad input or config, 3 accuracy
// bound violated, 4 fit failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "gsdscope/budget.hpp"
#include "gsdscope/errors.hpp"
#include "gsdscope/fit.hpp"
#include "gsdscope/imaging.hpp"
#include "gsdscope/io.hpp"

namespace {

using namespace gsdscope;

/// Flag values are unit strings ("4.2um"); a bare number is rejected with
/// the flag name so the caller knows which suffix is missing.
double cli_qty(const char* flag, const std::string& text, Unit expected) {
    Quantity q;
    try {
        q = parse_quantity(text);
    } catch (const ParseError& e) {
        throw ConfigError(std::string(flag) + ": " + e.what());
    }
    if (expected == Unit::RadiansPerSecond && q.unit == Unit::Hertz)
        return q.value * 6.283185307179586;
    if (q.unit != expected)
        throw ConfigError(std::string(flag) + ": expected a quantity in " +
                          std::string(unit_symbol(expected)) + ", got \"" + text + "\"");
    return q.value;
}

std::string format_si(double v, const char* unit) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g %s", v, unit);
    return buf;
}

struct EpsfArgs {
    std::string waist, power, tau, shape, r_max, output;
    double nbar_ax = -1.0, nbar_rad = -1.0;
    int samples = 241;
    bool exact = false;
};

int run_epsf(const RunConfig& cfg, const EpsfArgs& args) {
    BeamSpec beam = cfg.beam;
    PulseSpec pulse = cfg.pulse;
    ThermalState state = cfg.state;
    if (!args.waist.empty() || !args.power.empty() || !args.shape.empty()) {
        BeamShape shape = beam.shape;
        if (!args.shape.empty()) {
            if (args.shape == "vortex") shape = BeamShape::Vortex;
            else if (args.shape == "gaussian") shape = BeamShape::Gaussian;
            else throw ConfigError("--beam must be \"vortex\" or \"gaussian\"");
        }
        beam = BeamSpec(shape,
                        args.power.empty() ? beam.power
                                           : cli_qty("--power", args.power, Unit::Watt),
                        args.waist.empty() ? beam.waist
                                           : cli_qty("--waist", args.waist, Unit::Meter),
                        beam.center, beam.transition);
    }
    if (!args.tau.empty()) pulse = PulseSpec(cli_qty("--tau", args.tau, Unit::Second));
    if (args.nbar_ax >= 0.0 || args.nbar_rad >= 0.0) {
        const double rad = args.nbar_rad >= 0.0 ? args.nbar_rad : state.nbar_x;
        const double ax = args.nbar_ax >= 0.0 ? args.nbar_ax : state.nbar_z;
        state = ThermalState(rad, rad, ax);
    }
    const bool thermal = args.exact || args.nbar_ax >= 0.0 || args.nbar_rad >= 0.0;
    const double r_max = args.r_max.empty() ? 0.0 : cli_qty("--r-max", args.r_max, Unit::Meter);

    const Profile profile =
        epsf_profile(beam, pulse, cfg.trap, state,
                     thermal ? EpsfMode::ThermalClosedForm : EpsfMode::PointIon, r_max,
                     args.samples, cfg.constants);

    SetupSpec setup = cfg.setup;
    setup.waist = beam.waist;
    setup.tau = pulse.tau;
    const double p_ns = power_no_superresolution(setup, cfg.constants);
    std::cout << "response width sigma = "
              << format_si(epsf_sigma(beam.waist, pulse.tau, beam.power, beam.transition,
                                      cfg.constants),
                           "m")
              << "\n";
    std::cout << "saturation power     = " << format_si(p_ns, "W") << "\n";
    std::cout << "saturation s         = " << format_si(beam.power / p_ns, "") << "\n";

    const std::string path =
        args.output.empty() ? cfg.output_prefix + "_epsf.csv" : args.output;
    write_profile_csv(path, profile);
    std::cout << "wrote " << path << "\n";
    return 0;
}

struct ScanArgs {
    std::string output, cut;
    long shots = 0;
};

int run_scan(const RunConfig& cfg, const ScanArgs& args) {
    ImageGrid image = scan_image(cfg.scan, cfg.beam, cfg.pulse, cfg.trap, cfg.state, cfg.grid,
                                 cfg.frames, cfg.constants);
    if (args.shots > 0) {
        image.values = add_shot_noise(image.values, args.shots, cfg.seed);
        nlohmann::json prov = nlohmann::json::parse(image.provenance);
        prov["noise"] = {{"shots", args.shots}, {"seed", cfg.seed}};
        image.provenance = prov.dump(2);
    }

    const std::string prefix = args.output.empty() ? cfg.output_prefix : args.output;
    write_image_csv(prefix + "_image.csv", image);
    write_image_pgm(prefix + "_image.pgm", image);
    write_text_file(prefix + "_provenance.json", image.provenance + "\n");
    std::cout << "wrote " << prefix << "_image.csv, " << prefix << "_image.pgm, " << prefix
              << "_provenance.json\n";

    if (!args.cut.empty()) {
        std::vector<int> rows;
        std::size_t start = 0;
        while (start <= args.cut.size()) {
            auto pos = args.cut.find(',', start);
            if (pos == std::string::npos) pos = args.cut.size();
            try {
                rows.push_back(std::stoi(args.cut.substr(start, pos - start)));
            } catch (const std::exception&) {
                throw ConfigError("--cut needs comma separated row indices");
            }
            start = pos + 1;
        }
        write_profile_csv(prefix + "_cut.csv", profile_cut(image, rows));
        std::cout << "wrote " << prefix << "_cut.csv\n";
    }
    return 0;
}

struct FitArgs {
    std::string data, output;
};

int run_fit(const RunConfig& cfg, const FitArgs& args) {
    const std::string data_path = args.data.empty() ? cfg.fit.data : args.data;
    if (data_path.empty()) throw ConfigError("fit needs a data file (--data or fit.data)");
    const Profile data = read_profile_csv(data_path);

    FitResult result;
    std::map<std::string, double> derived;
    if (cfg.fit.model == "lorentzian") {
        result = fit_lorentzian(data.coordinate, data.value, data.sigma);
    } else {
        if (cfg.fit.params.empty())
            throw ConfigError("fit.params must list at least one free parameter");
        GsdModelContext ctx;
        ctx.beam = cfg.beam;
        ctx.pulse = cfg.pulse;
        ctx.trap = cfg.trap;
        ctx.state = cfg.state;
        ctx.grid = cfg.grid;
        ctx.frames = cfg.frames;
        ctx.convolve = cfg.fit.convolve;
        ctx.pc = cfg.constants;
        std::vector<std::string> names;
        for (const auto& p : cfg.fit.params) names.push_back(p.name);
        const ModelFn model = gsd_profile_model(ctx, names, data.coordinate);
        result = least_squares(model, cfg.fit.params, data.value, data.sigma);

        if (result.estimates.count("nbar_z")) {
            const double nbar = result.estimates.at("nbar_z");
            const double s0 = ground_state_width(cfg.trap.mass, cfg.trap.omega_z, cfg.constants);
            const double sz = thermal_width(s0, nbar);
            derived["sigma_z"] = sz;
            derived["sigma_z_uncertainty"] =
                s0 * s0 / sz * result.uncertainties.at("nbar_z");
        }
    }

    const std::string json = fit_result_json(result, derived);
    std::cout << json;
    if (!args.output.empty()) write_text_file(args.output, json);
    if (!result.converged) {
        std::cerr << "fit did not converge: " << result.message << "\n";
        return 4;
    }
    return 0;
}

struct ThermoArgs {
    std::string red, blue, output;
};

int run_thermometry(const ThermoArgs& args) {
    const Spectrum red = read_spectrum_csv(args.red);
    const Spectrum blue = read_spectrum_csv(args.blue);

    auto fit_peak = [](const Spectrum& s, const char* label) {
        std::vector<double> sigma(s.p.size());
        for (std::size_t i = 0; i < s.p.size(); ++i)
            sigma[i] = binomial_measurement(s.p[i], s.shots[i]).sigma;
        FitResult r = fit_lorentzian(s.detuning, s.p, sigma);
        if (!r.converged)
            throw FitError(std::string("sideband peak fit did not converge (") + label + ")");
        return r;
    };
    // Peak excitation is the line height above zero, amplitude + offset.
    auto peak_of = [](const FitResult& r) {
        const double a = r.estimates.at("amplitude");
        const double b = r.estimates.at("offset");
        const double sa = r.uncertainties.at("amplitude");
        const double sb = r.uncertainties.at("offset");
        return Measurement{a + b, std::sqrt(sa * sa + sb * sb)};
    };
    // A red sideband with no excitation at all is the ground-state limit;
    // there is no line to fit, the peak is zero by inspection.
    const bool red_dark =
        std::all_of(red.p.begin(), red.p.end(), [](double v) { return v == 0.0; });
    const Measurement p_rsb = red_dark ? Measurement{0.0, 0.0} : peak_of(fit_peak(red, "red"));
    const Measurement p_bsb = peak_of(fit_peak(blue, "blue"));
    NbarEstimate nbar;
    try {
        nbar = nbar_from_sideband_ratio(p_rsb, p_bsb);
    } catch (const DomainError& e) {
        throw FitError(e.what());
    }

    nlohmann::json j;
    j["nbar"] = nbar.nbar;
    j["nbar_sigma"] = nbar.sigma;
    j["p_rsb"] = p_rsb.value;
    j["p_bsb"] = p_bsb.value;
    j["ratio"] = p_rsb.value / p_bsb.value;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!args.output.empty()) write_text_file(args.output, text);
    return 0;
}

struct BudgetArgs {
    double p_max = 0.0;
    std::string waist, output;
};

int run_budget(const RunConfig& cfg, const BudgetArgs& args) {
    SetupSpec setup = cfg.setup;
    if (!args.waist.empty()) setup.waist = cli_qty("--waist", args.waist, Unit::Meter);
    const double p_max = args.p_max > 0.0 ? args.p_max : cfg.budget_p_max;

    const auto table = budget_table(p_max, setup);
    std::printf("center excitation cap p_max = %.6g, w0*k = %.6g\n", p_max, setup.w0k());
    std::printf("%-17s %12s %14s %15s %12s %8s %10s\n", "channel", "coefficient",
                "s_lim/(w0k)^2", "sigma_deriv_nm", "sigma_ref_nm", "ref_s", "ref_sig_nm");
    for (const auto& e : table)
        std::printf("%-17s %12.4g %14.4g %15.4g %12.4g %8.0e %10.4g\n",
                    channel_name(e.channel).c_str(), e.coefficient, e.s_limit_normalized,
                    e.sigma_limit_derived * 1e9, e.sigma_limit_reference * 1e9, e.reference_s,
                    e.reference_sigma * 1e9);

    if (!args.output.empty()) {
        std::ostringstream csv;
        csv << "channel,coefficient,s_limit_over_w0k2,sigma_limit_derived_m,"
               "sigma_limit_reference_m,reference_s_decade,reference_sigma_nm\n";
        for (const auto& e : table) {
            char buf[320];
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          channel_name(e.channel).c_str(), e.coefficient, e.s_limit_normalized,
                          e.sigma_limit_derived, e.sigma_limit_reference, e.reference_s,
                          e.reference_sigma * 1e9);
            csv << buf;
        }
        write_text_file(args.output, csv.str());
        std::cout << "wrote " << args.output << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent ground-state-depletion microscopy of a trapped ion"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "1.0.0");

    std::string config_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "random seed override");

    EpsfArgs epsf_args;
    auto* epsf = app.add_subcommand("epsf", "depletion response profile");
    epsf->add_option("--waist", epsf_args.waist, "beam waist, e.g. 4.2um");
    epsf->add_option("--power", epsf_args.power, "beam power, e.g. 1.2mW");
    epsf->add_option("--tau", epsf_args.tau, "pulse duration, e.g. 19us");
    epsf->add_option("--beam", epsf_args.shape, "vortex or gaussian");
    epsf->add_option("--nbar-ax", epsf_args.nbar_ax, "axial occupancy (thermal response)");
    epsf->add_option("--nbar-rad", epsf_args.nbar_rad, "radial occupancy (thermal response)");
    epsf->add_flag("--exact", epsf_args.exact, "thermal response at the config state");
    epsf->add_option("--samples", epsf_args.samples, "number of radial samples");
    epsf->add_option("--r-max", epsf_args.r_max, "outermost radius, e.g. 6um");
    epsf->add_option("--output", epsf_args.output, "output CSV path");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "raster scan of beam against ion");
    scan->add_option("--output", scan_args.output, "output path prefix");
    scan->add_option("--shots", scan_args.shots, "per-pixel shots of binomial noise (0 = none)");
    scan->add_option("--cut", scan_args.cut, "comma separated row indices for a profile cut");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "least-squares fit of a profile");
    fit->add_option("--data", fit_args.data, "profile CSV (overrides fit.data)");
    fit->add_option("--output", fit_args.output, "write the result JSON here too");

    ThermoArgs thermo_args;
    auto* thermo = app.add_subcommand("thermometry", "sideband asymmetry thermometry");
    thermo->add_option("--red", thermo_args.red, "red sideband spectrum CSV")->required();
    thermo->add_option("--blue", thermo_args.blue, "blue sideband spectrum CSV")->required();
    thermo->add_option("--output", thermo_args.output, "write the result JSON here too");

    BudgetArgs budget_args;
    auto* budget = app.add_subcommand("budget", "spurious excitation budget");
    budget->add_option("--p-max", budget_args.p_max, "center excitation cap (default 0.01)");
    budget->add_option("--waist", budget_args.waist, "beam waist override");
    budget->add_option("--output", budget_args.output, "write the table as CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;

        if (app.got_subcommand(epsf)) return run_epsf(cfg, epsf_args);
        if (app.got_subcommand(scan)) return run_scan(cfg, scan_args);
        if (app.got_subcommand(fit)) return run_fit(cfg, fit_args);
        if (app.got_subcommand(thermo)) return run_thermometry(thermo_args);
        if (app.got_subcommand(budget)) return run_budget(cfg, budget_args);
        return 2;
    } catch (const AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 3;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
