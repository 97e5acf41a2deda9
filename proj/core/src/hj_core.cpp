#include "pathwise/hj_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

TimeDependentPotential::TimeDependentPotential(CatalogEntry entry, int dim, std::vector<Vec> shifts)
    : entry_(entry), dim_(dim), shifts_(std::move(shifts)) {
    if (shifts_.empty()) throw ConfigError("potential shift table is empty");
}

TimeDependentPotential TimeDependentPotential::fixed(const CatalogEntry& entry, int dim,
                                                     const TimeGrid& grid) {
    return TimeDependentPotential(entry, dim, std::vector<Vec>(std::size_t(grid.steps()) + 1));
}

double TimeDependentPotential::value(int k, const Vec& y) const {
    return catalog_value(entry_, y + shift(k), dim_);
}

Vec TimeDependentPotential::gradient(int k, const Vec& y) const {
    return catalog_eval(entry_, y + shift(k), dim_).gradient;
}

std::vector<double> running_cost(const TimeDependentPotential& pot, int k, const SpaceGrid& grid,
                                 double delta) {
    std::vector<double> out(grid.node_count());
    if (pot.entry().kind == CatalogKind::zero) return out;
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = delta * pot.value(k, grid.point(n));
    return out;
}

HJStepper::HJStepper(const ProblemSpec& spec, const SpaceGrid& grid, double delta)
    : spec_(spec),
      grid_(grid),
      delta_(delta),
      lattice_(spec.dim, spec.control_bound, spec.lattice_K, spec.lagrangian) {
    if (grid.dim() != spec.dim) throw ConfigError("space grid and problem dimensions differ");
    if (!(delta > 0.0)) throw ConfigError("time step must be positive");
    auto split = [&](double d, int& cell, double& theta) {
        double s = d / grid_.spacing();
        const double r = std::round(s);
        if (std::abs(s - r) <= 1e-12 * std::max(1.0, std::abs(s))) s = r;
        cell = int(std::floor(s));
        theta = s - cell;
    };
    for (std::size_t c = 0; c < lattice_.size(); ++c) {
        Stencil st{0, 0, 0.0, 0.0};
        split(delta * lattice_.point(c)[0], st.di, st.tx);
        if (grid.dim() == 2) split(delta * lattice_.point(c)[1], st.dj, st.ty);
        stencils_.push_back(st);
    }
}

double HJStepper::lattice_value(const ScalarField& next, int i, int j, std::size_t c) const {
    const Stencil& st = stencils_[c];
    const int M = grid_.nodes_per_axis();
    const int a = i + st.di;
    const int b = j + st.dj;
    const bool inside = a >= 0 && a <= M - 2 && (grid_.dim() == 1 || (b >= 0 && b <= M - 2));
    if (!inside) return interpolate(next, grid_.point(i, j) + lattice_.point(c) * delta_);
    const auto v = next.values();
    const std::size_t n00 = grid_.index(a, b);
    if (grid_.dim() == 1) return v[n00] + st.tx * (v[n00 + 1] - v[n00]);
    const std::size_t n01 = n00 + std::size_t(M);
    const double bottom = v[n00] + st.tx * (v[n00 + 1] - v[n00]);
    const double top = v[n01] + st.tx * (v[n01 + 1] - v[n01]);
    return bottom + st.ty * (top - bottom);
}

double HJStepper::min_1d_exact(const ScalarField& next, double y) const {
    const double delta = delta_;
    const auto v = next.values();
    const int M = grid_.nodes_per_axis();
    const double h = grid_.spacing();
    const double x0 = grid_.lower()[0];
    const double xM = grid_.upper()[0];
    const double reach = delta * spec_.control_bound;
    const double lo = y - reach;
    const double hi = y + reach;

    double best = std::numeric_limits<double>::infinity();
    // I(z) = anchor_v + slope (z - anchor_x) on [a, b].
    auto consider = [&](double a, double b, double anchor_x, double anchor_v, double slope) {
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (a > b) return;
        const double z = std::clamp(y - delta * slope, a, b);
        const double val = (z - y) * (z - y) / (2.0 * delta) + anchor_v + slope * (z - anchor_x);
        best = std::min(best, val);
    };

    const bool extrapolate = next.boundary_mode() == BoundaryMode::linear_extrapolate;
    const double left_slope = extrapolate ? (v[1] - v[0]) / h : 0.0;
    const double right_slope = extrapolate ? (v[std::size_t(M - 1)] - v[std::size_t(M - 2)]) / h : 0.0;
    if (lo < x0) consider(lo, x0, x0, v[0], left_slope);
    if (hi > xM) consider(xM, hi, xM, v[std::size_t(M - 1)], right_slope);

    const int j0 = std::clamp(int(std::floor((lo - x0) / h)), 0, M - 2);
    const int j1 = std::clamp(int(std::floor((hi - x0) / h)), 0, M - 2);
    for (int j = j0; j <= j1; ++j) {
        const auto ju = std::size_t(j);
        const double xa = x0 + j * h;
        consider(xa, xa + h, xa, v[ju], (v[ju + 1] - v[ju]) / h);
    }
    return best;
}

double HJStepper::min_2d_fixed_point(const ScalarField& next, const Vec& y, Vec u0) const {
    const double delta = delta_;
    const double C = spec_.control_bound;
    double best = std::numeric_limits<double>::infinity();
    auto run = [&](Vec u) {
        for (int it = 0; it < 4; ++it) {
            u = project_to_ball(-interpolant_gradient(next, y + delta * u), C);
            best = std::min(best, 0.5 * delta * norm2(u) + interpolate(next, y + delta * u));
        }
    };
    run(u0);
    run(Vec{});
    return best;
}

ScalarField HJStepper::step(const ScalarField& next, std::span<const double> running) const {
    if (!(next.grid() == grid_)) throw ConfigError("field grid does not match the stepper grid");
    const bool quadratic = spec_.lagrangian.kind == LagrangianKind::quadratic;
    std::vector<double> out(grid_.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const int i = grid_.axis_index(n, 0);
        const int j = grid_.dim() == 2 ? grid_.axis_index(n, 1) : 0;
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t c = 0; c < lattice_.size(); ++c) {
            const double val = delta_ * lattice_.cost(c) + lattice_value(next, i, j, c);
            if (val < best) {
                best = val;
                arg = c;
            }
        }
        if (quadratic) {
            const Vec y = grid_.point(n);
            const double exact = grid_.dim() == 1 ? min_1d_exact(next, y[0])
                                                  : min_2d_fixed_point(next, y, lattice_.point(arg));
            best = std::min(best, exact);
        }
        out[n] = best + (running.empty() ? 0.0 : running[n]);
    }
    return ScalarField(grid_, std::move(out), next.boundary_mode());
}

ValueSequence solve_hj_backward(const ProblemSpec& spec, const TimeDependentPotential& pot,
                                const ScalarField& terminal) {
    spec.validate();
    const TimeGrid& tg = spec.horizon;
    const int N = tg.steps();
    if (pot.node_count() != std::size_t(N) + 1) {
        throw ConfigError("potential shift table does not cover every time node");
    }
    const HJStepper stepper(spec, terminal.grid(), tg.delta());
    std::vector<ScalarField> fields(std::size_t(N) + 1, terminal);
    for (int k = N - 1; k >= 0; --k) {
        const auto running = running_cost(pot, k, terminal.grid(), tg.delta());
        fields[std::size_t(k)] = stepper.step(fields[std::size_t(k) + 1], running);
    }
    return ValueSequence{tg, std::move(fields), "hopf-lax"};
}

ValueSequence solve_viscous_hjb(const ProblemSpec& spec, const ScalarField& terminal) {
    spec.validate();
    const TimeGrid& tg = spec.horizon;
    const SpaceGrid& grid = terminal.grid();
    const double h = grid.spacing();
    const double ratio = spec.nu * tg.delta() / (h * h);
    if (ratio > 0.5) {
        throw ConfigError("explicit diffusion is unstable: nu*delta/h^2 = " + format_double(ratio) +
                          " exceeds 1/2");
    }
    const int N = tg.steps();
    const HJStepper stepper(spec, grid, tg.delta());
    const auto pot = TimeDependentPotential::fixed(spec.potential, spec.dim, tg);
    const auto running = running_cost(pot, 0, grid, tg.delta());
    const double diffusion = 0.5 * spec.nu * tg.delta();

    std::vector<ScalarField> fields(std::size_t(N) + 1, terminal);
    for (int k = N - 1; k >= 0; --k) {
        ScalarField H = stepper.step(fields[std::size_t(k) + 1], running);
        const ScalarField lap = laplacian(H);
        for (std::size_t n = 0; n < grid.node_count(); ++n) H[n] += diffusion * lap[n];
        fields[std::size_t(k)] = std::move(H);
    }
    return ValueSequence{tg, std::move(fields), "viscous"};
}

void write_value_sequence(const std::filesystem::path& dir, const ValueSequence& seq, int stride,
                          const std::string& prefix) {
    std::filesystem::create_directories(dir);
    const int N = seq.grid.steps();
    stride = std::max(stride, 1);
    std::ofstream index(dir / (prefix + "_index.csv"));
    index << "k,t,file\n";
    for (int k = 0; k <= N; ++k) {
        if (k % stride != 0 && k != N) continue;
        const std::string name = prefix + "_" + std::to_string(k) + ".csv";
        std::ofstream out(dir / name);
        write_field_csv(out, seq.at(k));
        index << k << ',' << format_double(seq.grid.node(k)) << ',' << name << '\n';
    }
}

}  // namespace pathwise
