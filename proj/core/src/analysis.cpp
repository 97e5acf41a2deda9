#include "pathwise/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

namespace {

bool same_shape(const CatalogEntry& a, const CatalogEntry& b) {
    auto norm_kind = [](CatalogKind k) { return k == CatalogKind::zero ? CatalogKind::constant : k; };
    if (norm_kind(a.kind) != norm_kind(b.kind)) return false;
    switch (a.kind) {
        case CatalogKind::zero:
        case CatalogKind::constant: return true;
        case CatalogKind::linear: return a.a == b.a;
        case CatalogKind::cosine: return a.kappa == b.kappa && a.k == b.k && a.phase == b.phase;
        case CatalogKind::quadratic:
        case CatalogKind::radial_cosine: return a.kappa == b.kappa;
    }
    return false;
}

double offset_of(const CatalogEntry& e) { return e.kind == CatalogKind::zero ? 0.0 : e.offset; }

}  // namespace

ComparisonReport comparison_check(const ProblemSpec& spec, const BrownianPath& path,
                                  const SpaceGrid& grid, const CatalogEntry& S1,
                                  const CatalogEntry& S2, SolveMethod method, double tolerance) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_node = 0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const double d = catalog_value(S1, grid.point(n), spec.dim) - catalog_value(S2, grid.point(n), spec.dim);
        if (d > worst) {
            worst = d;
            worst_node = n;
        }
    }
    if (worst > 0.0) {
        const Vec p = grid.point(worst_node);
        throw PreconditionError("terminal data not ordered: S1 - S2 = " + format_double(worst) +
                                " at node " + std::to_string(worst_node) + " (x = " +
                                format_double(p[0]) + (spec.dim == 2 ? ", " + format_double(p[1]) : "") + ")");
    }

    ProblemSpec p1 = spec, p2 = spec;
    p1.terminal = S1;
    p2.terminal = S2;
    const ValueField U1 = solve_value(method, p1, path, grid);
    const ValueField U2 = solve_value(method, p2, path, grid);

    const bool shifted = same_shape(S1, S2);
    const double c = offset_of(S2) - offset_of(S1);
    ComparisonReport rep{0.0, shifted ? 0.0 : std::numeric_limits<double>::quiet_NaN(), 0, 0, true};
    for (int k = 0; k <= U1.time().steps(); ++k) {
        for (std::size_t n = 0; n < grid.node_count(); ++n) {
            const double d = U1.at(k)[n] - U2.at(k)[n];
            if (d > rep.positive_part) {
                rep.positive_part = d;
                rep.worst_k = k;
                rep.worst_node = n;
            }
            if (shifted) rep.max_shift_gap = std::max(rep.max_shift_gap, std::abs(-d - c));
        }
    }
    rep.passed = rep.positive_part <= tolerance && (!shifted || rep.max_shift_gap <= tolerance);
    return rep;
}

ContinuityModuli continuity_moduli(const ValueField& vf, int points, double core_fraction) {
    const SpaceGrid& g = vf.space();
    const CoreRegion core = CoreRegion::of(g, core_fraction);
    const int N = vf.time().steps();
    const double h = g.spacing();
    const double delta = vf.time().delta();
    const int M = g.nodes_per_axis();

    double lip = 0.0;
    for (int k = 0; k <= N; ++k) {
        const ScalarField& U = vf.at(k);
        for (std::size_t n : core.nodes(g)) {
            for (int a = 0; a < g.dim(); ++a) {
                if (g.axis_index(n, a) >= core.hi) continue;
                const std::size_t m = n + (a == 0 ? 1 : std::size_t(M));
                lip = std::max(lip, std::abs(U[m] - U[n]) / h);
            }
        }
    }

    std::vector<int> lags;
    for (int l = 1; l <= N / 4; l *= 2) lags.push_back(l);

    const auto nodes = core.nodes(g);
    points = std::max(points, 1);
    double slope_sum = 0.0;
    int slope_count = 0;
    for (int p = 0; p < points && lags.size() >= 2; ++p) {
        const std::size_t n = nodes[std::size_t((p + 0.5) * double(nodes.size()) / points)];
        std::vector<double> xs, ys;
        for (int l : lags) {
            double acc = 0.0;
            int cnt = 0;
            for (int k = 0; k + l <= N; ++k) {
                const double d = std::abs(vf.at(k + l)[n] - vf.at(k)[n]);
                if (d > 0.0) {
                    acc += std::log(d);
                    ++cnt;
                }
            }
            if (cnt > 0) {
                xs.push_back(l * delta);
                ys.push_back(std::exp(acc / cnt));
            }
        }
        if (xs.size() >= 2) {
            slope_sum += fit_loglog_slope(xs, ys);
            ++slope_count;
        }
    }

    const bool degenerate = lip == 0.0 || slope_count == 0;
    return ContinuityModuli{lip, slope_count > 0 ? slope_sum / slope_count : 0.0, degenerate};
}

double lipschitz_bound(const ProblemSpec& spec, double radius) {
    return spec.terminal.gradient_bound(radius) +
           spec.horizon.horizon() * spec.potential.gradient_bound(radius);
}

std::string to_string(ReferenceKind r) {
    return r == ReferenceKind::closed_form ? "closed-form" : "finest-level";
}

ReferenceKind reference_kind_from_string(const std::string& name) {
    if (name == "closed-form") return ReferenceKind::closed_form;
    if (name == "finest-level") return ReferenceKind::finest_level;
    throw ConfigError("unknown convergence reference '" + name + "'");
}

bool ConvergenceReport::strictly_decreasing() const {
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (!(levels[i].error < levels[i - 1].error)) return false;
    return true;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ConfigError("slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ProblemSpec refined_spec(const ProblemSpec& spec, int times) {
    ProblemSpec out = spec;
    for (int i = 0; i < times; ++i) out.horizon = out.horizon.refined();
    return out;
}

SpaceGrid refined_grid(const SpaceGrid& grid, int times) {
    SpaceGrid out = grid;
    for (int i = 0; i < times; ++i) out = out.refined();
    return out;
}

ConvergenceReport convergence_study(const ProblemSpec& spec, const SpaceGrid& grid,
                                    const BrownianPath& base_path, int levels,
                                    ReferenceKind reference, SolveMethod method,
                                    double core_fraction) {
    if (levels < 3) throw ConfigError("a convergence study needs at least 3 levels");
    if (reference == ReferenceKind::closed_form && !has_closed_form(spec)) {
        throw ConfigError("closed-form reference requested for a problem without one");
    }
    ConvergenceReport rep{method, reference, {}, 0.0, false};

    std::optional<ValueField> finest;
    if (reference == ReferenceKind::finest_level) {
        finest = solve_value(method, refined_spec(spec, levels), refine_path(base_path, levels),
                             refined_grid(grid, levels));
    }

    for (int l = 0; l < levels; ++l) {
        const ProblemSpec sp = refined_spec(spec, l);
        const SpaceGrid gl = refined_grid(grid, l);
        const BrownianPath pl = refine_path(base_path, l);
        const ValueField vf = solve_value(method, sp, pl, gl);
        double err = 0.0;
        if (reference == ReferenceKind::closed_form) {
            err = closed_form_error(vf, sp, pl, core_fraction);
        } else {
            const int r = 1 << (levels - l);
            const SpaceGrid& gf = finest->space();
            for (int k = 0; k <= sp.horizon.steps(); ++k) {
                for (std::size_t n : CoreRegion::of(gl, core_fraction).nodes(gl)) {
                    const int i = gl.axis_index(n, 0) * r;
                    const int j = gl.dim() == 2 ? gl.axis_index(n, 1) * r : 0;
                    err = std::max(err, std::abs(vf.at(k)[n] - finest->at(k * r)[gf.index(i, j)]));
                }
            }
        }
        rep.levels.push_back({l, sp.horizon.delta(), gl.spacing(), err});
    }

    std::vector<double> xs, ys;
    rep.slope_applicable = true;
    for (const auto& lv : rep.levels) {
        if (!(lv.error > 1e-13)) rep.slope_applicable = false;
        xs.push_back(lv.delta);
        ys.push_back(lv.error);
    }
    rep.slope = rep.slope_applicable ? fit_loglog_slope(xs, ys) : 0.0;
    return rep;
}

std::vector<double> cross_method_gaps(const ProblemSpec& spec, const SpaceGrid& grid,
                                      const BrownianPath& base_path, int levels,
                                      double core_fraction) {
    std::vector<double> gaps;
    for (int l = 0; l < levels; ++l) {
        const ProblemSpec sp = refined_spec(spec, l);
        const SpaceGrid gl = refined_grid(grid, l);
        const BrownianPath pl = refine_path(base_path, l);
        gaps.push_back(core_gap(solve_by_shift(sp, pl, gl), solve_by_splitting(sp, pl, gl), core_fraction));
    }
    return gaps;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "level,delta,h,error\n";
    for (const auto& lv : report.levels) {
        out << lv.level << ',' << format_double(lv.delta) << ',' << format_double(lv.h) << ','
            << format_double(lv.error) << '\n';
    }
}

}  // namespace pathwise
