#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "detail.hpp"
#include "pathwise/analysis.hpp"
#include "pathwise/drift_dynamics.hpp"
#include "pathwise/errors.hpp"
#include "pathwise/invariants.hpp"
#include "pathwise/oracle.hpp"

namespace pathwise::experiment::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string seed_dir(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

// Tracks the entry closest to (or furthest past) its threshold.
struct Worst {
    double ratio = -std::numeric_limits<double>::infinity();
    double measured = kNaN;
    double threshold = kNaN;
    bool passed = true;
    std::string detail;

    void offer(double m, double t, const std::string& where) {
        const bool ok = m <= t;
        passed = passed && ok;
        const double r = t > 0.0 ? m / t : (m > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (r > ratio || std::isnan(m)) {
            ratio = std::isnan(m) ? std::numeric_limits<double>::infinity() : r;
            measured = m;
            threshold = t;
            detail = where;
        }
        if (std::isnan(m)) passed = false;
    }
    void report(Context& ctx, const std::string& name) const {
        ctx.check(name, passed, measured, threshold, detail);
    }
};

ValueField solve(SolveMethod m, const ProblemSpec& spec, const BrownianPath& path, const Setup& s,
                 const SpaceGrid& grid) {
    return m == SolveMethod::shift ? solve_by_shift(spec, path, grid, s.boundary)
                                   : solve_by_splitting(spec, path, grid, s.boundary);
}

double max_abs(const ValueField& vf) {
    double out = 0.0;
    for (const auto& f : vf.seq.fields) {
        for (double v : f.values()) out = std::max(out, std::abs(v));
    }
    return out;
}

std::string path_csv(const BrownianPath& p) {
    std::ostringstream os;
    write_path_csv(os, p);
    return os.str();
}

// Uniform [0,1) from a 64-bit engine, independent of the standard library's
// distribution implementations.
double unit(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

std::string short_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

int default_stride(int N) { return std::max(1, N / 4); }

}  // namespace

// ---------------------------------------------------------------------------

void run_value(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const int N = s.spec.horizon.steps();
    const int stride = cfg.get_int("value", "dump_stride", default_stride(N));
    const bool holder = cfg.get_bool("value", "holder", false);
    const int points = cfg.get_int("value", "continuity_points", 20);
    if (stride < 1) cfg.fail("value", "dump_stride", "stride must be positive");
    if (points < 1) cfg.fail("value", "continuity_points", "need at least one point");
    ctx.ready();

    struct Run {
        double max_abs_U = 0.0;
        double err = kNaN;
        double mag = kNaN;
        ContinuityModuli cm{};
    };
    const std::size_t nm = s.methods.size();
    std::vector<std::vector<Run>> runs(s.seeds.size(), std::vector<Run>(nm));
    std::vector<double> gaps(s.seeds.size(), kNaN);
    const bool closed = has_closed_form(s.spec);

    parallel_for(s.seeds.size(), ctx.workers(), [&](std::size_t i) {
        const auto seed = s.seeds[i];
        const auto path = generate_path(seed, s.spec.horizon, s.spec.dim);
        ctx.write(seed_dir(seed) + "/path.csv", path_csv(path));
        std::optional<ValueField> first;
        for (std::size_t m = 0; m < nm; ++m) {
            auto vf = solve(s.methods[m], s.spec, path, s, s.grid);
            write_value_sequence(ctx.path(seed_dir(seed) + "/" + to_string(s.methods[m])), vf.seq, stride);
            Run& r = runs[i][m];
            r.max_abs_U = max_abs(vf);
            if (closed) {
                r.err = closed_form_error(vf, s.spec, path, s.core_fraction);
                r.mag = closed_form_magnitude(vf, s.spec, path, s.core_fraction);
            }
            r.cm = continuity_moduli(vf, points, s.core_fraction);
            if (nm > 1) {
                if (!first) first = std::move(vf);
                else if (m == 1) gaps[i] = core_gap(*first, vf, s.core_fraction);
            }
        }
    });

    const double rel = ctx.tolerance("closed_form_rel");
    const double abs_tol = ctx.tolerance("closed_form_abs");
    const double radius = s.box_radius + 3.0 * std::sqrt(s.spec.nu * s.spec.horizon.horizon());
    const double lip_bound = lipschitz_bound(s.spec, radius) * (1.0 + ctx.tolerance("lipschitz_slack"));
    const bool lipschitz_case = s.spec.potential.lipschitz() && s.spec.terminal.lipschitz();

    Worst closed_worst, lip_worst;
    double max_abs_all = 0.0;
    json rows = json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        for (std::size_t m = 0; m < nm; ++m) {
            const Run& r = runs[i][m];
            const std::string where = "seed " + std::to_string(s.seeds[i]) + " " + to_string(s.methods[m]);
            max_abs_all = std::max(max_abs_all, r.max_abs_U);
            if (closed) closed_worst.offer(r.err, rel * (1.0 + r.mag) + abs_tol, where);
            if (lipschitz_case) lip_worst.offer(r.cm.lip_x, lip_bound, where);
            json j;
            j["seed"] = s.seeds[i];
            j["method"] = to_string(s.methods[m]);
            j["max_abs_U"] = r.max_abs_U;
            if (closed) {
                j["closed_form_error"] = r.err;
                j["closed_form_magnitude"] = r.mag;
            }
            j["lip_x"] = r.cm.lip_x;
            j["holder_t"] = r.cm.holder_t;
            j["degenerate"] = r.cm.degenerate;
            rows.push_back(j);
        }
    }
    ctx.measurements()["runs"] = rows;
    ctx.measurements()["max_abs_U"] = max_abs_all;
    if (nm > 1) {
        json g = json::array();
        for (std::size_t i = 0; i < s.seeds.size(); ++i) g.push_back({{"seed", s.seeds[i]}, {"core_gap", gaps[i]}});
        ctx.measurements()["cross_method_gap"] = g;
    }
    ctx.measurements()["lipschitz_bound"] = lip_bound;

    if (closed) closed_worst.report(ctx, "closed_form");
    if (lipschitz_case) lip_worst.report(ctx, "lipschitz");
    if (holder) {
        const double lo = ctx.tolerance("holder_min");
        const double hi = ctx.tolerance("holder_max");
        for (std::size_t m = 0; m < nm; ++m) {
            double sum = 0.0;
            int count = 0;
            for (std::size_t i = 0; i < s.seeds.size(); ++i) {
                if (runs[i][m].cm.degenerate) continue;
                sum += runs[i][m].cm.holder_t;
                ++count;
            }
            const double mean = count ? sum / count : kNaN;
            ctx.measurements()["holder_mean_" + to_string(s.methods[m])] = mean;
            ctx.check("holder_" + to_string(s.methods[m]), count > 0 && mean >= lo && mean <= hi, mean, hi,
                      "mean over " + std::to_string(count) + " seeds, accepted range [" + short_num(lo) + ", " +
                          short_num(hi) + "]");
        }
    }
}

// ---------------------------------------------------------------------------

void run_oracle_compare(Context& ctx, Setup s) {
    const auto& cfg = ctx.cfg;
    const int N = cfg.get_int("oracle", "N", 4);
    if (N < 1) cfg.fail("oracle", "N", "need at least one step");
    s.spec.horizon = TimeGrid(s.spec.horizon.t0(), s.spec.horizon.T(), N);
    s.spec.control_bound = cfg.get_double("oracle", "control_bound", 4.0);
    if (!(s.spec.control_bound > 0.0)) cfg.fail("oracle", "control_bound", "control bound must be positive");
    OracleOptions base;
    base.K_ctrl = cfg.get_int("oracle", "K_ctrl", 40);
    base.budget = cfg.get_double("oracle", "budget", 1e8);
    base.control_bound = s.spec.control_bound;
    if (base.K_ctrl < 1) cfg.fail("oracle", "K_ctrl", "K_ctrl must be positive");
    const auto points = read_points(cfg, "oracle", "points", s.spec.dim,
                                    s.spec.dim == 1 ? std::vector<double>{0.7} : std::vector<double>{0.7, -0.3});
    const int t_index = cfg.get_int("oracle", "t_index", 0);
    if (t_index < 0 || t_index >= N) cfg.fail("oracle", "t_index", "t_index must lie in [0, N)");
    std::vector<OracleMode> modes;
    for (const auto& m : cfg.get_strings("oracle", "modes", std::vector<std::string>{"enumeration", "lattice-dp"})) {
        try {
            modes.push_back(oracle_mode_from_string(m));
        } catch (const ConfigError& e) {
            cfg.fail("oracle", "modes", e.what());
        }
    }
    const bool descent = cfg.get_bool("oracle", "descent", true);
    ctx.ready();
    s.spec.validate();

    struct Entry {
        std::vector<OracleResult> oracle;
        std::vector<double> solver;
        std::optional<double> closed;
        double descent_cost = kNaN;
    };
    std::vector<std::vector<Entry>> table(s.seeds.size(), std::vector<Entry>(points.size()));
    parallel_for(s.seeds.size(), ctx.workers(), [&](std::size_t i) {
        const auto path = generate_path(s.seeds[i], s.spec.horizon, s.spec.dim);
        std::vector<ValueField> solved;
        for (auto m : s.methods) solved.push_back(solve(m, s.spec, path, s, s.grid));
        for (std::size_t p = 0; p < points.size(); ++p) {
            Entry& e = table[i][p];
            for (auto mode : modes) {
                OracleOptions opt = base;
                opt.mode = mode;
                e.oracle.push_back(brute_force_value(s.spec, path, t_index, points[p], opt));
            }
            for (const auto& vf : solved) e.solver.push_back(interpolate(vf.at(t_index), points[p]));
            e.closed = closed_form_value(s.spec, path, t_index, points[p]);
            if (descent) {
                e.descent_cost = descent_refine(s.spec, path, t_index, points[p], e.oracle.front().best).cost;
            }
        }
    });

    std::ostringstream csv;
    csv << "seed,point,mode,oracle,sequences,method,solver,gap,closed_form,descent\n";
    Worst gap_worst, mode_worst;
    json rows = json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            const Entry& e = table[i][p];
            const std::string label = point_label(points[p], s.spec.dim);
            const std::string where = "seed " + std::to_string(s.seeds[i]) + " x=(" + label + ")";
            const double ref = e.oracle.front().value;
            for (std::size_t o = 0; o < modes.size(); ++o) {
                if (o > 0) mode_worst.offer(std::abs(e.oracle[o].value - ref), ctx.tolerance("oracle_modes"), where);
                for (std::size_t m = 0; m < s.methods.size(); ++m) {
                    const double gap = std::abs(e.oracle[o].value - e.solver[m]);
                    csv << s.seeds[i] << ",\"" << label << "\"," << to_string(modes[o]) << ","
                        << num(e.oracle[o].value) << "," << num(e.oracle[o].sequences) << ","
                        << to_string(s.methods[m]) << "," << num(e.solver[m]) << "," << num(gap) << ","
                        << (e.closed ? num(*e.closed) : "") << "," << num(e.descent_cost) << "\n";
                }
            }
            for (std::size_t m = 0; m < s.methods.size(); ++m) {
                gap_worst.offer(std::abs(ref - e.solver[m]), ctx.tolerance("oracle_gap"),
                                where + " " + to_string(s.methods[m]));
            }
            json j;
            j["seed"] = s.seeds[i];
            j["point"] = label;
            json o = json::object();
            for (std::size_t k = 0; k < modes.size(); ++k) o[to_string(modes[k])] = e.oracle[k].value;
            j["oracle"] = o;
            json sv = json::object();
            for (std::size_t m = 0; m < s.methods.size(); ++m) sv[to_string(s.methods[m])] = e.solver[m];
            j["solver"] = sv;
            if (e.closed) j["closed_form"] = *e.closed;
            if (descent) j["descent_cost"] = e.descent_cost;
            rows.push_back(j);
        }
    }
    ctx.write("oracle.csv", csv.str());
    ctx.measurements()["oracle_N"] = N;
    ctx.measurements()["K_ctrl"] = base.K_ctrl;
    ctx.measurements()["entries"] = rows;
    gap_worst.report(ctx, "oracle_gap");
    if (modes.size() > 1) mode_worst.report(ctx, "oracle_modes");
}

// ---------------------------------------------------------------------------

void run_dpp(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const auto windows_d = cfg.get_doubles("dpp", "windows", std::vector<double>{1.0, 5.0});
    const int npoints = cfg.get_int("dpp", "points", 20);
    const auto sample_seed = cfg.get_seeds("dpp", "sample_seed", std::vector<std::uint64_t>{12345});
    const bool refine = cfg.get_bool("dpp", "refine", true);
    const int N = s.spec.horizon.steps();
    std::vector<int> windows;
    for (double w : windows_d) {
        if (w != std::floor(w) || w < 1 || w >= N) cfg.fail("dpp", "windows", "windows must be integers in [1, N)");
        windows.push_back(int(w));
    }
    if (npoints < 1) cfg.fail("dpp", "points", "need at least one point");
    if (sample_seed.size() != 1) cfg.fail("dpp", "sample_seed", "expected a single seed");
    ctx.ready();

    const int max_window = *std::max_element(windows.begin(), windows.end());
    const CoreRegion core = CoreRegion::of(s.grid, s.core_fraction);
    const Vec lo = s.grid.point(core.lo, s.spec.dim == 2 ? core.lo : 0);
    const Vec hi = s.grid.point(core.hi, s.spec.dim == 2 ? core.hi : 0);
    std::mt19937_64 gen(sample_seed.front());
    std::vector<std::pair<int, Vec>> samples;
    for (int i = 0; i < npoints; ++i) {
        const int k = std::min(N - max_window, int(unit(gen) * (N - max_window + 1)));
        Vec x{lo[0] + unit(gen) * (hi[0] - lo[0]), 0.0};
        if (s.spec.dim == 2) x[1] = lo[1] + unit(gen) * (hi[1] - lo[1]);
        samples.emplace_back(k, x);
    }

    const int levels = refine ? 2 : 1;
    const SolveMethod method = s.methods.front();
    // residual[seed][level][window][sample]
    std::vector<std::vector<std::vector<std::vector<double>>>> res(
        s.seeds.size(), std::vector<std::vector<std::vector<double>>>(levels));
    parallel_for(s.seeds.size() * levels, ctx.workers(), [&](std::size_t task) {
        const std::size_t i = task / levels;
        const int l = int(task % levels);
        const auto spec = refined_spec(s.spec, l);
        const auto grid = refined_grid(s.grid, l);
        const auto path = refine_path(generate_path(s.seeds[i], s.spec.horizon, s.spec.dim), l);
        const auto vf = solve(method, spec, path, s, grid);
        auto& out = res[i][std::size_t(l)];
        for (int w : windows) {
            std::vector<double> r;
            for (const auto& [k, x] : samples) r.push_back(dpp_residual(vf, spec, path, k << l, x, w));
            out.push_back(std::move(r));
        }
    });

    std::ostringstream csv;
    csv << "seed,level,window,k,point,residual\n";
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        for (int l = 0; l < levels; ++l) {
            for (std::size_t w = 0; w < windows.size(); ++w) {
                for (std::size_t p = 0; p < samples.size(); ++p) {
                    csv << s.seeds[i] << "," << l << "," << windows[w] << "," << (samples[p].first << l) << ",\""
                        << point_label(samples[p].second, s.spec.dim) << "\"," << num(res[i][l][w][p]) << "\n";
                }
            }
        }
    }
    ctx.write("dpp.csv", csv.str());

    const double floor = ctx.tolerance("noise_floor");
    json rows = json::array();
    for (std::size_t w = 0; w < windows.size(); ++w) {
        Worst base, ratio;
        bool ratio_applicable = false;
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            const std::string where = "seed " + std::to_string(s.seeds[i]);
            const double r0 = *std::max_element(res[i][0][w].begin(), res[i][0][w].end());
            base.offer(r0, ctx.tolerance("dpp_residual"), where);
            json j{{"seed", s.seeds[i]}, {"window", windows[w]}, {"residual", r0}};
            if (refine) {
                const double r1 = *std::max_element(res[i][1][w].begin(), res[i][1][w].end());
                j["refined_residual"] = r1;
                if (r0 > floor) {
                    ratio_applicable = true;
                    ratio.offer(r1 / r0, ctx.tolerance("dpp_ratio"), where);
                }
            }
            rows.push_back(j);
        }
        const std::string tag = "_m" + std::to_string(windows[w]);
        base.report(ctx, "dpp_residual" + tag);
        if (refine) {
            if (ratio_applicable) ratio.report(ctx, "dpp_ratio" + tag);
            else ctx.check("dpp_ratio" + tag, true, kNaN, ctx.tolerance("dpp_ratio"), "residual below noise floor");
        }
    }
    ctx.measurements()["method"] = to_string(method);
    ctx.measurements()["residuals"] = rows;
}

// ---------------------------------------------------------------------------

void run_drift(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const auto starts = read_points(cfg, "drift", "starts", s.spec.dim,
                                    s.spec.dim == 1 ? std::vector<double>{-1.0, -0.3, 0.4, 1.2}
                                                    : std::vector<double>{1.0, 0.5, -0.8, 1.1, 0.3, -1.4});
    Integrator scheme = Integrator::euler;
    try {
        scheme = integrator_from_string(cfg.get_string("drift", "integrator", "euler"));
    } catch (const ConfigError& e) {
        cfg.fail("drift", "integrator", e.what());
    }
    const bool strict = cfg.get_bool("drift", "strict", false);
    const int levels = cfg.get_int("drift", "levels", 3);
    if (levels < 1) cfg.fail("drift", "levels", "need at least one level");
    ctx.ready();

    const SolveMethod method = s.methods.front();
    const bool affine_exact = s.spec.terminal.hessian_bound() == 0.0 && s.spec.potential.hessian_bound() == 0.0 &&
                              has_closed_form(s.spec);
    struct Level {
        double delta, h, momentum = 0.0, terminal = 0.0, spde, terminal_gap, drift_err = kNaN;
        std::size_t clamped_core;
    };
    std::vector<std::vector<Level>> out(s.seeds.size(), std::vector<Level>(std::size_t(levels)));
    parallel_for(s.seeds.size() * std::size_t(levels), ctx.workers(), [&](std::size_t task) {
        const std::size_t i = task / std::size_t(levels);
        const int l = int(task % std::size_t(levels));
        const auto spec = refined_spec(s.spec, l);
        const auto grid = refined_grid(s.grid, l);
        const auto path = refine_path(generate_path(s.seeds[i], s.spec.horizon, s.spec.dim), l);
        const auto vf = solve(method, spec, path, s, grid);
        const auto drift = extract_drift(vf, spec, strict, s.core_fraction);
        Level& L = out[i][std::size_t(l)];
        L.delta = spec.horizon.delta();
        L.h = grid.spacing();
        L.clamped_core = drift.clamped_core_nodes;
        for (std::size_t p = 0; p < starts.size(); ++p) {
            const auto state = simulate_optimal(spec, path, drift, 0, starts[p], scheme);
            const auto mr = momentum_residual(drift, state, spec);
            L.momentum = std::max(L.momentum, mr.path);
            L.terminal = std::max(L.terminal, mr.terminal);
            if (l == 0) {
                std::ostringstream os;
                write_trajectory_csv(os, state, drift);
                ctx.write("trajectories/" + seed_dir(s.seeds[i]) + "_start_" + std::to_string(p) + ".csv", os.str());
            }
        }
        L.spde = drift_spde_residual(drift, path, spec, s.core_fraction);
        L.terminal_gap = terminal_drift_gap(drift, spec);
        if (affine_exact) {
            double e = 0.0;
            const auto nodes = CoreRegion::of(grid, s.core_fraction).nodes(grid);
            for (int k = 0; k <= spec.horizon.steps(); ++k) {
                for (auto n : nodes) {
                    const auto cf = closed_form_drift(spec, path, k, grid.point(n));
                    e = std::max(e, norm(drift.at(k)[n] - *cf));
                }
            }
            L.drift_err = e;
        }
    });

    std::ostringstream csv;
    csv << "seed,level,delta,h,momentum,terminal,spde,terminal_gap,closed_form_drift,clamped_core_nodes\n";
    json rows = json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        for (int l = 0; l < levels; ++l) {
            const Level& L = out[i][std::size_t(l)];
            csv << s.seeds[i] << "," << l << "," << num(L.delta) << "," << num(L.h) << "," << num(L.momentum) << ","
                << num(L.terminal) << "," << num(L.spde) << "," << num(L.terminal_gap) << ","
                << (affine_exact ? num(L.drift_err) : "") << "," << L.clamped_core << "\n";
            json j{{"seed", s.seeds[i]},      {"level", l},          {"delta", L.delta},
                   {"h", L.h},                {"momentum", L.momentum}, {"terminal", L.terminal},
                   {"spde", L.spde},          {"terminal_gap", L.terminal_gap}};
            if (affine_exact) j["closed_form_drift"] = L.drift_err;
            rows.push_back(j);
        }
    }
    ctx.write("drift_levels.csv", csv.str());
    ctx.measurements()["method"] = to_string(method);
    ctx.measurements()["levels"] = rows;

    const double floor = ctx.tolerance("noise_floor");
    const double hess = s.spec.terminal.hessian_bound();
    Worst momentum, ratio, terminal, spde, order, drift_err;
    bool ratio_applicable = false, order_applicable = false;
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        const std::string where = "seed " + std::to_string(s.seeds[i]);
        const Level& L0 = out[i][0];
        momentum.offer(L0.momentum, ctx.tolerance("momentum"), where);
        // 1e-12 absorbs rounding when S'' = 0.
        terminal.offer(L0.terminal, ctx.tolerance("terminal_factor") * L0.h * hess + 1e-12, where);
        spde.offer(L0.spde, ctx.tolerance("spde"), where);
        if (affine_exact) drift_err.offer(L0.drift_err, ctx.tolerance("closed_form_drift"), where);
        if (levels > 1 && L0.momentum > floor) {
            ratio_applicable = true;
            ratio.offer(out[i][1].momentum / L0.momentum, ctx.tolerance("momentum_ratio"), where);
        }
        if (levels > 1 && L0.spde > floor) {
            order_applicable = true;
            std::vector<double> x, y;
            for (const auto& L : out[i]) {
                x.push_back(L.delta);
                y.push_back(std::max(L.spde, std::numeric_limits<double>::min()));
            }
            const double slope = fit_loglog_slope(x, y);
            // Criterion is a lower bound; invert so Worst can treat it as "<= threshold".
            order.offer(-slope, -ctx.tolerance("spde_order"), where);
        }
    }
    momentum.report(ctx, "momentum");
    if (levels > 1) {
        if (ratio_applicable) ratio.report(ctx, "momentum_ratio");
        else ctx.check("momentum_ratio", true, kNaN, ctx.tolerance("momentum_ratio"), "residual below noise floor");
    }
    terminal.report(ctx, "terminal_gap");
    spde.report(ctx, "spde");
    if (levels > 1) {
        if (order_applicable) {
            ctx.check("spde_order", order.passed, -order.measured, -order.threshold, order.detail);
        } else {
            ctx.check("spde_order", true, kNaN, ctx.tolerance("spde_order"), "residual below noise floor");
        }
    }
    if (affine_exact) drift_err.report(ctx, "closed_form_drift");
}

// ---------------------------------------------------------------------------

void run_invariants(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const auto sym_names =
        cfg.get_strings("invariants", "symmetries", std::vector<std::string>{"rotation", "time-translation"});
    const double omega = cfg.get_double("invariants", "omega", 1.0);
    const auto starts = read_points(cfg, "invariants", "starts", s.spec.dim,
                                    s.spec.dim == 1 ? std::vector<double>{-1.0, 0.4, 1.2}
                                                    : std::vector<double>{1.0, 0.5, -0.8, 1.1, 0.3, -1.4});
    const bool radial = cfg.get_bool("invariants", "radial", s.spec.dim == 2);
    const double radial_kappa = cfg.get_double("invariants", "radial.kappa", 1.0);
    const auto radial_start = read_points(cfg, "invariants", "radial.start", s.spec.dim,
                                          s.spec.dim == 1 ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.5});
    Integrator scheme = Integrator::euler;
    try {
        scheme = integrator_from_string(cfg.get_string("invariants", "integrator", "euler"));
    } catch (const ConfigError& e) {
        cfg.fail("invariants", "integrator", e.what());
    }
    std::vector<SymmetryField> syms;
    for (const auto& n : sym_names) {
        if (n == "rotation") {
            if (s.spec.dim != 2) cfg.fail("invariants", "symmetries", "rotation needs dim = 2");
            syms.push_back(SymmetryField::rotation(omega));
        } else if (n == "time-translation") {
            syms.push_back(SymmetryField::time_translation());
        } else {
            cfg.fail("invariants", "symmetries", "unknown symmetry '" + n + "' (rotation, time-translation)");
        }
    }
    if (radial && s.spec.dim != 2) cfg.fail("invariants", "radial", "radial check needs dim = 2");
    ctx.ready();

    ProblemSpec rspec = s.spec;
    rspec.potential = CatalogEntry::radial_cosine(radial_kappa);
    rspec.terminal = CatalogEntry::radial_cosine(radial_kappa);
    rspec.control_bound = default_control_bound(rspec.potential, rspec.terminal, rspec.nu, rspec.horizon, s.box_radius);
    const double guard = ctx.tolerance("radial_guard");

    const SolveMethod method = s.methods.front();
    struct PerSeed {
        std::vector<double> R, Q;  // per symmetry
        double radial = kNaN;
    };
    std::vector<PerSeed> res(s.seeds.size());
    parallel_for(s.seeds.size(), ctx.workers(), [&](std::size_t i) {
        const auto seed = s.seeds[i];
        const auto path = generate_path(seed, s.spec.horizon, s.spec.dim);
        const auto vf = solve(method, s.spec, path, s, s.grid);
        const auto drift = extract_drift(vf, s.spec, false, s.core_fraction);
        PerSeed& r = res[i];
        r.R.assign(syms.size(), 0.0);
        r.Q.assign(syms.size(), 0.0);
        for (std::size_t p = 0; p < starts.size(); ++p) {
            const auto state = simulate_optimal(s.spec, path, drift, 0, starts[p], scheme);
            for (std::size_t q = 0; q < syms.size(); ++q) {
                const auto trace = conserved_quantity(syms[q], drift, state, path, s.spec);
                r.R[q] = std::max(r.R[q], trace.max_abs_residual());
                r.Q[q] = std::max(r.Q[q], trace.max_abs_Q());
                std::ostringstream os;
                write_trace_csv(os, trace);
                ctx.write("traces/" + seed_dir(seed) + "_" + sym_names[q] + "_start_" + std::to_string(p) + ".csv",
                          os.str());
            }
        }
        if (radial) {
            const auto rv = solve(method, rspec, path, s, s.grid);
            const auto rd = extract_drift(rv, rspec, false, s.core_fraction);
            const auto state = simulate_optimal(rspec, path, rd, 0, radial_start.front(), scheme);
            r.radial = symmetry_residual(SymmetryField::rotation(omega), rd, state, rspec, guard);
        }
    });

    json rows = json::array();
    for (std::size_t q = 0; q < syms.size(); ++q) {
        Worst w;
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            w.offer(res[i].R[q], ctx.tolerance("conserved_rel") * (1.0 + res[i].Q[q]),
                    "seed " + std::to_string(s.seeds[i]));
            rows.push_back({{"seed", s.seeds[i]},
                            {"symmetry", sym_names[q]},
                            {"max_abs_residual", res[i].R[q]},
                            {"max_abs_Q", res[i].Q[q]}});
        }
        w.report(ctx, "conserved_" + sym_names[q]);
    }
    ctx.measurements()["method"] = to_string(method);
    ctx.measurements()["traces"] = rows;
    if (radial) {
        Worst w;
        json rr = json::array();
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            w.offer(res[i].radial, ctx.tolerance("radial_symmetry"), "seed " + std::to_string(s.seeds[i]));
            rr.push_back({{"seed", s.seeds[i]}, {"residual", res[i].radial}});
        }
        ctx.measurements()["radial_problem"] = problem_json(rspec);
        ctx.measurements()["radial_symmetry"] = rr;
        w.report(ctx, "radial_symmetry");
    }
}

// ---------------------------------------------------------------------------

void run_comparison(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const double shift = cfg.get_double("comparison", "shift", 1.0);
    const bool ordered = cfg.get_bool("comparison", "ordered", true);
    const auto lower = read_catalog(cfg, "comparison", "lower",
                                    CatalogEntry::cosine(-1.0, Vec{1.0, 0.0}, 0.0, -1.0));
    const auto upper = read_catalog(cfg, "comparison", "upper",
                                    CatalogEntry::cosine(1.0, Vec{1.0, 0.0}, -std::numbers::pi / 2, 1.0));
    if (!(shift > 0.0)) cfg.fail("comparison", "shift", "shift must be positive");
    ctx.ready();

    const SolveMethod method = s.methods.front();
    const double tol = ctx.tolerance("positive_part");
    std::vector<ComparisonReport> shifted(s.seeds.size()), pair(s.seeds.size());
    parallel_for(s.seeds.size(), ctx.workers(), [&](std::size_t i) {
        const auto path = generate_path(s.seeds[i], s.spec.horizon, s.spec.dim);
        shifted[i] = comparison_check(s.spec, path, s.grid, s.spec.terminal, s.spec.terminal.plus(shift), method, tol);
        if (ordered) pair[i] = comparison_check(s.spec, path, s.grid, lower, upper, method, tol);
    });

    std::ostringstream csv;
    csv << "seed,pair,positive_part,shift_gap,worst_k,worst_node\n";
    Worst pos, gap, opos;
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        const std::string where = "seed " + std::to_string(s.seeds[i]);
        csv << s.seeds[i] << ",shift," << num(shifted[i].positive_part) << "," << num(shifted[i].max_shift_gap) << ","
            << shifted[i].worst_k << "," << shifted[i].worst_node << "\n";
        pos.offer(shifted[i].positive_part, tol, where);
        gap.offer(shifted[i].max_shift_gap, ctx.tolerance("shift_gap"), where);
        if (ordered) {
            csv << s.seeds[i] << ",ordered," << num(pair[i].positive_part) << ",," << pair[i].worst_k << ","
                << pair[i].worst_node << "\n";
            opos.offer(pair[i].positive_part, tol, where);
        }
    }
    ctx.write("comparison.csv", csv.str());
    ctx.measurements()["method"] = to_string(method);
    ctx.measurements()["shift"] = shift;
    if (ordered) ctx.measurements()["ordered_pair"] = {lower.id(), upper.id()};
    pos.report(ctx, "shift_positive_part");
    gap.report(ctx, "shift_gap");
    if (ordered) opos.report(ctx, "ordered_positive_part");
}

// ---------------------------------------------------------------------------

void run_convergence(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const int levels = cfg.get_int("convergence", "levels", 3);
    if (levels < 3) cfg.fail("convergence", "levels", "need at least 3 levels");
    const bool closed = has_closed_form(s.spec);
    ReferenceKind reference = closed ? ReferenceKind::closed_form : ReferenceKind::finest_level;
    if (cfg.has("convergence", "reference")) {
        try {
            reference = reference_kind_from_string(cfg.get_string("convergence", "reference"));
        } catch (const ConfigError& e) {
            cfg.fail("convergence", "reference", e.what());
        }
        if (reference == ReferenceKind::closed_form && !closed) {
            cfg.fail("convergence", "reference", "this problem has no closed form");
        }
    }
    const bool gaps_wanted = cfg.get_bool("convergence", "cross_method", s.methods.size() > 1);
    ctx.ready();

    const std::size_t nm = s.methods.size();
    const std::size_t per_seed = nm + (gaps_wanted ? 1 : 0);
    std::vector<std::vector<ConvergenceReport>> reports(s.seeds.size(), std::vector<ConvergenceReport>(nm));
    std::vector<std::vector<double>> gaps(s.seeds.size());
    parallel_for(s.seeds.size() * per_seed, ctx.workers(), [&](std::size_t task) {
        const std::size_t i = task / per_seed;
        const std::size_t j = task % per_seed;
        const auto path = generate_path(s.seeds[i], s.spec.horizon, s.spec.dim);
        if (j < nm) {
            reports[i][j] = convergence_study(s.spec, s.grid, path, levels, reference, s.methods[j], s.core_fraction);
        } else {
            gaps[i] = cross_method_gaps(s.spec, s.grid, path, levels, s.core_fraction);
        }
    });

    json rows = json::array();
    for (std::size_t j = 0; j < nm; ++j) {
        const std::string m = to_string(s.methods[j]);
        Worst slope, mono;
        bool slope_applicable = false;
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            const auto& rep = reports[i][j];
            std::ostringstream os;
            write_convergence_csv(os, rep);
            ctx.write("convergence/" + m + "_" + seed_dir(s.seeds[i]) + ".csv", os.str());
            const std::string where = "seed " + std::to_string(s.seeds[i]);
            json errs = json::array();
            bool monotone = true;
            for (std::size_t l = 0; l < rep.levels.size(); ++l) {
                errs.push_back(rep.levels[l].error);
                if (l > 0 && rep.levels[l].error > rep.levels[l - 1].error) monotone = false;
            }
            if (reference == ReferenceKind::finest_level) monotone = rep.strictly_decreasing();
            mono.offer(monotone ? 0.0 : 1.0, 0.0, where);
            if (reference == ReferenceKind::closed_form && rep.slope_applicable) {
                slope_applicable = true;
                slope.offer(-rep.slope, -ctx.tolerance("slope"), where);
            }
            rows.push_back({{"seed", s.seeds[i]},
                            {"method", m},
                            {"reference", to_string(reference)},
                            {"errors", errs},
                            {"slope", rep.slope_applicable ? rep.slope : kNaN}});
        }
        if (reference == ReferenceKind::closed_form) {
            if (slope_applicable) ctx.check("slope_" + m, slope.passed, -slope.measured, -slope.threshold, slope.detail);
            else ctx.check("slope_" + m, true, kNaN, ctx.tolerance("slope"), "not applicable: errors at rounding level");
        }
        ctx.check("monotone_" + m, mono.passed, mono.measured, 0.0,
                  reference == ReferenceKind::closed_form ? "errors non-increasing across levels"
                                                          : "errors strictly decreasing across levels");
    }
    ctx.measurements()["studies"] = rows;
    if (gaps_wanted) {
        Worst w;
        json g = json::array();
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            std::ostringstream os;
            os << "level,delta,h,gap\n";
            bool strict = true;
            for (std::size_t l = 0; l < gaps[i].size(); ++l) {
                os << l << "," << num(refined_spec(s.spec, int(l)).horizon.delta()) << ","
                   << num(refined_grid(s.grid, int(l)).spacing()) << "," << num(gaps[i][l]) << "\n";
                if (l > 0 && !(gaps[i][l] < gaps[i][l - 1])) strict = false;
            }
            ctx.write("convergence/gaps_" + seed_dir(s.seeds[i]) + ".csv", os.str());
            w.offer(strict ? 0.0 : 1.0, 0.0, "seed " + std::to_string(s.seeds[i]));
            g.push_back({{"seed", s.seeds[i]}, {"gaps", gaps[i]}});
        }
        ctx.measurements()["cross_method_gaps"] = g;
        ctx.check("gap_monotone", w.passed, w.measured, 0.0, "cross-method core gap strictly decreasing");
    }
}

// ---------------------------------------------------------------------------

void run_hopf_cole(Context& ctx, const Setup& s) {
    const auto& cfg = ctx.cfg;
    const std::string sec = "hopf-cole";
    const double nu = cfg.get_double(sec, "nu", 0.25);
    const double t0 = cfg.get_double(sec, "t0", 0.0);
    const double T = cfg.get_double(sec, "T", 1.0);
    const int N = cfg.get_int(sec, "N", 800);
    const double lo = cfg.get_double(sec, "lower", -8.0);
    const double hi = cfg.get_double(sec, "upper", 8.0);
    const int M = cfg.get_int(sec, "M", 801);
    const double core_fraction = cfg.get_double(sec, "core_fraction", 0.5);
    const auto cases = cfg.get_strings(sec, "cases", std::vector<std::string>{"zero", "gaussian"});
    const std::string acc_name = cfg.get_string(sec, "accumulation", "log-sum-exp");
    const int stride = cfg.get_int(sec, "dump_stride", default_stride(N));
    if (!(nu > 0.0)) cfg.fail(sec, "nu", "nu must be positive");
    if (!(T > t0)) cfg.fail(sec, "T", "horizon end must exceed t0");
    if (N < 1) cfg.fail(sec, "N", "need at least one step");
    if (M < 3 || !(hi > lo)) cfg.fail(sec, "M", "need at least 3 nodes on a non-empty interval");
    if (stride < 1) cfg.fail(sec, "dump_stride", "stride must be positive");
    if (!(core_fraction > 0.0 && core_fraction <= 1.0)) cfg.fail(sec, "core_fraction", "must lie in (0, 1]");
    for (const auto& c : cases) {
        if (c != "zero" && c != "gaussian") cfg.fail(sec, "cases", "unknown case '" + c + "' (zero, gaussian)");
    }
    Accumulation acc;
    if (acc_name == "log-sum-exp") acc = Accumulation::log_sum_exp;
    else if (acc_name == "direct") acc = Accumulation::direct;
    else cfg.fail(sec, "accumulation", "expected log-sum-exp or direct");
    ctx.ready();

    const TimeGrid tg(t0, T, N);
    const SpaceGrid grid(lo, hi, M);
    const auto core = CoreRegion::of(grid, core_fraction).nodes(grid);
    struct Out {
        double residual = kNaN, defect = kNaN, measure = kNaN;
        std::string error;
    };
    const std::size_t nc = cases.size();
    std::vector<Out> res(s.seeds.size() * nc);
    parallel_for(res.size(), ctx.workers(), [&](std::size_t task) {
        const std::size_t i = task / nc;
        const std::string& name = cases[task % nc];
        const auto path = generate_path(s.seeds[i], tg, 1);
        const auto f = name == "zero" ? ScalarField::constant(grid, 0.0, BoundaryMode::clamp)
                                      : ScalarField::sample(grid, [](const Vec& y) { return -0.5 * y[0] * y[0]; },
                                                            BoundaryMode::clamp);
        Out& o = res[task];
        try {
            const auto r = hopf_cole_reference(nu, path, f, acc, core_fraction);
            o.residual = r.residual;
            o.defect = r.normalization_defect;
            double m = 0.0;
            for (int k = 0; k <= N; ++k) {
                for (auto n : core) {
                    m = std::max(m, name == "zero" ? std::abs(r.logeta.at(k)[n])
                                                   : std::abs(r.eta.at(k)[n] - hopf_cole_gaussian(
                                                                                   nu, tg.node(k) - t0, path.at(k)[0],
                                                                                   grid.point(n)[0])));
                }
            }
            o.measure = m;
            write_value_sequence(ctx.path(seed_dir(s.seeds[i]) + "/" + name), r.eta, stride, "eta");
        } catch (const NumericalRangeError& e) {
            o.error = e.what();
        }
    });

    json rows = json::array();
    Worst zero, gauss, ito;
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        for (std::size_t c = 0; c < nc; ++c) {
            const Out& o = res[i * nc + c];
            const std::string where = "seed " + std::to_string(s.seeds[i]) + " " + cases[c];
            json j{{"seed", s.seeds[i]}, {"case", cases[c]}};
            if (!o.error.empty()) {
                j["error"] = o.error;
                ctx.check("numerical_range", false, kNaN, kNaN, where + ": " + o.error);
                rows.push_back(j);
                continue;
            }
            j["ito_residual"] = o.residual;
            j["normalization_defect"] = o.defect;
            if (cases[c] == "zero") {
                j["max_abs_log_eta"] = o.measure;
                zero.offer(std::max(o.residual, o.measure), ctx.tolerance("zero_residual"), where);
            } else {
                j["gaussian_error"] = o.measure;
                gauss.offer(o.measure, ctx.tolerance("gaussian"), where);
                ito.offer(o.residual, ctx.tolerance("ito_residual"), where);
            }
            rows.push_back(j);
        }
    }
    ctx.measurements()["grid"] = grid_json(grid);
    ctx.measurements()["time"] = {{"t0", t0}, {"T", T}, {"N", N}, {"nu", nu}};
    ctx.measurements()["accumulation"] = acc_name;
    ctx.measurements()["cases"] = rows;
    const bool has_zero = std::find(cases.begin(), cases.end(), "zero") != cases.end();
    const bool has_gauss = std::find(cases.begin(), cases.end(), "gaussian") != cases.end();
    if (has_zero && zero.ratio > -std::numeric_limits<double>::infinity()) zero.report(ctx, "zero_residual");
    if (has_gauss && gauss.ratio > -std::numeric_limits<double>::infinity()) {
        gauss.report(ctx, "gaussian_error");
        ito.report(ctx, "ito_residual");
    }
}

}  // namespace pathwise::experiment::detail
