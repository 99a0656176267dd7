#include "gsdscope/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "gsdscope/errors.hpp"
#include "gsdscope/parallel.hpp"

namespace gsdscope {

namespace {

/// Solves A x = b in place for a small dense system, partial pivoting.
/// Returns false when a pivot collapses.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t k,
                 std::vector<double>& x) {
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r * k + col]) > std::abs(a[pivot * k + col])) pivot = r;
        if (std::abs(a[pivot * k + col]) < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(a[col * k + c], a[pivot * k + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * k + col];
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a[r * k + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(k, 0.0);
    for (std::size_t ri = k; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < k; ++c) s -= a[ri * k + c] * x[c];
        x[ri] = s / a[ri * k + ri];
    }
    return true;
}

struct Engine {
    const ModelFn& model;
    const std::vector<FreeParam>& params;
    const std::vector<double>& y;
    std::vector<double> inv_sigma;
    const LsqOptions& opts;
    std::size_t n;
    std::size_t k;

    Engine(const ModelFn& m, const std::vector<FreeParam>& p, const std::vector<double>& yy,
           const std::vector<double>& sg, const LsqOptions& o)
        : model(m), params(p), y(yy), opts(o), n(yy.size()), k(p.size()) {
        if (k == 0) throw DomainError("fit needs at least one free parameter");
        if (n < k + 1)
            throw ConfigError("fit needs more data points than free parameters");
        std::set<std::string> seen;
        for (const auto& fp : params) {
            if (!seen.insert(fp.name).second)
                throw DomainError("duplicate fit parameter \"" + fp.name + "\"");
            if (!(fp.lower < fp.upper))
                throw DomainError("fit parameter \"" + fp.name + "\" has an empty range");
            if (fp.init < fp.lower || fp.init > fp.upper)
                throw DomainError("fit parameter \"" + fp.name +
                                  "\" starts outside its range");
        }
        if (sg.empty()) {
            inv_sigma.assign(n, 1.0);
        } else {
            if (sg.size() != n) throw DomainError("sigma length does not match data length");
            inv_sigma.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (sg[i] <= 0.0) throw DomainError("data sigma must be positive");
                inv_sigma[i] = 1.0 / sg[i];
            }
        }
    }

    std::vector<double> clip(std::vector<double> p) const {
        for (std::size_t j = 0; j < k; ++j)
            p[j] = std::clamp(p[j], params[j].lower, params[j].upper);
        return p;
    }

    std::vector<double> residuals(const std::vector<double>& p) const {
        const auto f = model(p);
        if (f.size() != n) throw DomainError("model returned wrong number of values");
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = (f[i] - y[i]) * inv_sigma[i];
        return r;
    }

    static double cost_of(const std::vector<double>& r) {
        double c = 0.0;
        for (double v : r) c += v * v;
        return c;
    }

    /// Forward differences, flipped to backward at the upper bound.
    /// Column-major: jac[j * n + i].
    std::vector<double> jacobian(const std::vector<double>& p,
                                 const std::vector<double>& r0) const {
        std::vector<double> jac(k * n);
        for (std::size_t j = 0; j < k; ++j) {
            const double span = params[j].upper - params[j].lower;
            double h = 1e-6 * std::max(std::abs(p[j]), 1e-3 * span);
            if (p[j] + h > params[j].upper) h = -h;
            auto pj = p;
            pj[j] = p[j] + h;
            const auto rj = residuals(pj);
            const double inv_h = 1.0 / (pj[j] - p[j]);
            for (std::size_t i = 0; i < n; ++i) jac[j * n + i] = (rj[i] - r0[i]) * inv_h;
        }
        return jac;
    }

    void gradient_and_hessian(const std::vector<double>& jac, const std::vector<double>& r,
                              std::vector<double>& g, std::vector<double>& h) const {
        g.assign(k, 0.0);
        h.assign(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t i = 0; i < n; ++i) g[a] += jac[a * n + i] * r[i];
            for (std::size_t b = a; b < k; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += jac[a * n + i] * jac[b * n + i];
                h[a * k + b] = s;
                h[b * k + a] = s;
            }
        }
    }

    double scaled_gradient(const std::vector<double>& g) const {
        double m = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            m = std::max(m, std::abs(g[j]) * (params[j].upper - params[j].lower));
        return m;
    }

    struct RunOut {
        std::vector<double> p;
        double cost = 0.0;
        int iterations = 0;
        bool converged = false;
        std::string message;
        std::vector<double> cost_trace;
    };

    RunOut run(const std::vector<double>& start) const {
        RunOut out;
        out.p = clip(start);
        auto r = residuals(out.p);
        out.cost = cost_of(r);
        out.cost_trace.push_back(out.cost);

        double lambda = opts.lambda_init;
        std::vector<double> g, h, delta;
        for (int iter = 0; iter < opts.max_iterations; ++iter) {
            const auto jac = jacobian(out.p, r);
            gradient_and_hessian(jac, r, g, h);
            if (scaled_gradient(g) <= opts.gradient_tol * (1.0 + out.cost)) {
                out.converged = true;
                out.message = "gradient criterion met";
                return out;
            }

            bool accepted = false;
            while (lambda <= opts.lambda_max) {
                auto damped = h;
                for (std::size_t j = 0; j < k; ++j) damped[j * k + j] *= 1.0 + lambda;
                std::vector<double> rhs(k);
                for (std::size_t j = 0; j < k; ++j) rhs[j] = -g[j];
                if (!solve_dense(damped, rhs, k, delta)) {
                    lambda *= 10.0;
                    continue;
                }
                auto p_try = out.p;
                for (std::size_t j = 0; j < k; ++j) p_try[j] += delta[j];
                p_try = clip(p_try);
                if (p_try == out.p) {
                    lambda *= 10.0;
                    continue;
                }
                auto r_try = residuals(p_try);
                const double c_try = cost_of(r_try);
                if (c_try < out.cost) {
                    out.p = std::move(p_try);
                    r = std::move(r_try);
                    out.cost = c_try;
                    out.cost_trace.push_back(out.cost);
                    lambda = std::max(lambda * 0.1, 1e-15);
                    accepted = true;
                    break;
                }
                lambda *= 10.0;
            }
            ++out.iterations;
            if (!accepted) {
                out.message = "damping stalled";
                return out;
            }
        }
        out.message = "iteration cap reached";
        return out;
    }

    /// Candidate starts: cartesian {0, +0.3, -0.3} * span offsets, clipped,
    /// de-duplicated, ranked by initial cost (stable).
    std::vector<std::vector<double>> candidate_starts() const {
        std::vector<double> init(k);
        for (std::size_t j = 0; j < k; ++j) init[j] = params[j].init;
        if (!opts.multistart) return {clip(init)};

        std::size_t combos = 1;
        for (std::size_t j = 0; j < k; ++j) combos *= 3;
        std::vector<std::vector<double>> starts;
        for (std::size_t c = 0; c < combos; ++c) {
            auto p = init;
            std::size_t rem = c;
            for (std::size_t j = 0; j < k; ++j) {
                const int digit = static_cast<int>(rem % 3);
                rem /= 3;
                const double span = params[j].upper - params[j].lower;
                if (digit == 1) p[j] += 0.3 * span;
                if (digit == 2) p[j] -= 0.3 * span;
            }
            p = clip(p);
            if (std::find(starts.begin(), starts.end(), p) == starts.end())
                starts.push_back(std::move(p));
        }

        std::vector<double> costs(starts.size());
        for (std::size_t s = 0; s < starts.size(); ++s)
            costs[s] = cost_of(residuals(starts[s]));
        std::vector<std::size_t> order(starts.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
        std::vector<std::vector<double>> ranked;
        ranked.reserve(starts.size());
        for (auto idx : order) ranked.push_back(std::move(starts[idx]));
        return ranked;
    }

    /// Uncertainties from the curvature at the solution, scaled by the
    /// reduced chi-square. Throws FitError when the curvature is singular,
    /// naming the most collinear parameter pair.
    std::vector<double> uncertainties(const std::vector<double>& p, double cost) const {
        const auto r = residuals(p);
        const auto jac = jacobian(p, r);
        std::vector<double> g, h;
        gradient_and_hessian(jac, r, g, h);

        for (std::size_t j = 0; j < k; ++j) {
            if (h[j * k + j] <= 0.0)
                throw FitError("parameter \"" + params[j].name +
                               "\" does not affect the model near the solution");
        }

        const double dof = static_cast<double>(n) - static_cast<double>(k);
        const double chi2_red = dof > 0.0 ? cost / dof : 1.0;

        std::vector<double> sig(k);
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<double> e(k, 0.0);
            e[j] = 1.0;
            std::vector<double> col;
            if (!solve_dense(h, e, k, col) || col[j] < 0.0) {
                // Singular curvature: report the most collinear pair.
                std::size_t pa = 0, pb = 1;
                double worst = -1.0;
                for (std::size_t a = 0; a < k; ++a) {
                    for (std::size_t b = a + 1; b < k; ++b) {
                        const double c = std::abs(h[a * k + b]) /
                                         std::sqrt(h[a * k + a] * h[b * k + b]);
                        if (c > worst) {
                            worst = c;
                            pa = a;
                            pb = b;
                        }
                    }
                }
                std::ostringstream msg;
                if (k >= 2) {
                    msg << "degenerate parameters \"" << params[pa].name << "\" and \""
                        << params[pb].name << "\": the data do not constrain them independently";
                } else {
                    msg << "parameter \"" << params[0].name << "\" is unconstrained";
                }
                throw FitError(msg.str());
            }
            sig[j] = std::sqrt(col[j] * chi2_red);
        }
        return sig;
    }
};

} // namespace

FitResult least_squares(const ModelFn& model, const std::vector<FreeParam>& params,
                        const std::vector<double>& y, const std::vector<double>& sigma,
                        const LsqOptions& opts) {
    const Engine eng(model, params, y, sigma, opts);

    const auto starts = eng.candidate_starts();
    Engine::RunOut best;
    bool have = false;
    int total_iterations = 0;
    std::size_t tried = 0;
    for (const auto& s : starts) {
        if (tried >= 1 + static_cast<std::size_t>(std::max(0, opts.max_extra_starts))) break;
        auto out = eng.run(s);
        ++tried;
        total_iterations += out.iterations;
        if (!have || out.cost < best.cost ||
            (out.converged && !best.converged && out.cost <= best.cost * (1.0 + 1e-9))) {
            best = std::move(out);
            have = true;
        }
        if (best.converged) break;
    }

    FitResult res;
    for (std::size_t j = 0; j < params.size(); ++j) res.estimates[params[j].name] = best.p[j];
    const auto unc = eng.uncertainties(best.p, best.cost);
    for (std::size_t j = 0; j < params.size(); ++j)
        res.uncertainties[params[j].name] = unc[j];
    res.residual_rms = std::sqrt(best.cost / static_cast<double>(y.size()));
    res.iterations = total_iterations;
    res.converged = best.converged;
    res.message = best.message;
    res.cost_trace = std::move(best.cost_trace);
    return res;
}

ModelFn gsd_profile_model(const GsdModelContext& ctx, const std::vector<std::string>& names,
                          const std::vector<double>& x) {
    static const std::set<std::string> known{"p0", "center", "nbar_z", "sigma_z"};
    std::set<std::string> seen;
    for (const auto& nm : names) {
        if (!known.count(nm))
            throw ConfigError("unknown profile-model parameter \"" + nm + "\"");
        if (!seen.insert(nm).second)
            throw ConfigError("duplicate profile-model parameter \"" + nm + "\"");
    }
    if (seen.count("nbar_z") && seen.count("sigma_z"))
        throw ConfigError("profile model takes either \"nbar_z\" or \"sigma_z\", not both");
    if (x.empty()) throw DomainError("profile model needs at least one coordinate");

    return [ctx, names, x](const std::vector<double>& p) {
        BeamSpec beam = ctx.beam;
        ThermalState state = ctx.state;
        double center = 0.0;
        double sigma_z = 0.0;
        bool have_sigma_z = false;
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (names[j] == "p0") beam.power = p[j];
            else if (names[j] == "center") center = p[j];
            else if (names[j] == "nbar_z") state.nbar_z = p[j];
            else {
                sigma_z = p[j];
                have_sigma_z = true;
            }
        }

        std::vector<double> out(x.size());
        if (!ctx.convolve) {
            const auto kp = k_projections(ctx.frames, beam.transition.wavenumber());
            const auto beta =
                dephasing_beta(ctx.trap, state, kp, BetaVariant::EtaSquared, ctx.pc);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double r = std::abs(x[i] - center);
                const double omega =
                    rabi_frequency(beam_intensity(r, beam), beam.transition, ctx.pc);
                out[i] = thermal_excitation(omega, ctx.pulse.tau, beta);
            }
            return out;
        }

        WavePacket wp = thermal_wavepacket(ctx.trap, state, Vec3{0.0, 0.0, 0.0}, ctx.pc);
        if (have_sigma_z) {
            if (sigma_z <= 0.0) throw DomainError("sigma_z must be positive");
            wp.sigma_z = sigma_z;
        }
        parallel_for(x.size(), [&](std::size_t i) {
            BeamSpec moved = beam;
            moved.center[1] += x[i] - center;
            out[i] = convolve_grid(moved, ctx.pulse, ctx.trap, state, wp, ctx.grid, ctx.frames,
                                   ctx.pc);
        });
        return out;
    };
}

double lorentzian(double x, double amplitude, double center, double hwhm, double offset) {
    const double d = x - center;
    return amplitude * hwhm * hwhm / (d * d + hwhm * hwhm) + offset;
}

FitResult fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& sigma, const LsqOptions& opts) {
    if (x.size() != y.size()) throw DomainError("x and y lengths differ");
    if (x.size() < 5) throw ConfigError("Lorentzian fit needs at least 5 points");

    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    if (span <= 0.0) throw DomainError("x coordinates are all identical");
    const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
    const double height = std::max(*ymax_it - *ymin_it, 1e-9);
    const double x_peak = x[static_cast<std::size_t>(ymax_it - y.begin())];

    std::vector<FreeParam> params{
        {"amplitude", height, 0.0, 4.0 * height},
        {"center", x_peak, *xmin_it, *xmax_it},
        {"hwhm", span / 6.0, span * 1e-3, 2.0 * span},
        {"offset", *ymin_it, *ymin_it - height, *ymax_it},
    };

    ModelFn model = [x](const std::vector<double>& p) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = lorentzian(x[i], p[0], p[1], p[2], p[3]);
        return out;
    };
    return least_squares(model, params, y, sigma, opts);
}

} // namespace gsdscope
