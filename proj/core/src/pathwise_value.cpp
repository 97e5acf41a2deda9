#include "pathwise/pathwise_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathwise/errors.hpp"

namespace pathwise {

std::string to_string(SolveMethod m) { return m == SolveMethod::shift ? "shift" : "splitting"; }

SolveMethod solve_method_from_string(const std::string& name) {
    if (name == "shift") return SolveMethod::shift;
    if (name == "splitting") return SolveMethod::splitting;
    throw ConfigError("unknown solve method '" + name + "' (expected shift or splitting)");
}

namespace {

void check_inputs(const ProblemSpec& spec, const BrownianPath& path, const SpaceGrid& grid) {
    spec.validate();
    if (!(path.grid() == spec.horizon)) {
        throw ConfigError("Brownian path grid differs from the problem horizon");
    }
    if (path.dim() != spec.dim || grid.dim() != spec.dim) {
        throw ConfigError("path, grid and problem dimensions must agree");
    }
}

ScalarField sample_entry(const CatalogEntry& e, int dim, const SpaceGrid& grid, const Vec& shift,
                         BoundaryMode mode) {
    return ScalarField::sample(
        grid, [&](const Vec& y) { return catalog_value(e, y + shift, dim); }, mode);
}

}  // namespace

ValueField solve_by_shift(const ProblemSpec& spec, const BrownianPath& path, const SpaceGrid& grid,
                          BoundaryMode mode) {
    check_inputs(spec, path, grid);
    const int N = spec.horizon.steps();
    const double sn = std::sqrt(spec.nu);
    std::vector<Vec> shifts(std::size_t(N) + 1);
    for (int k = 0; k <= N; ++k) shifts[std::size_t(k)] = (path.at(k) - path.at(0)) * sn;

    const TimeDependentPotential pot(spec.potential, spec.dim, shifts);
    const ScalarField terminal = sample_entry(spec.terminal, spec.dim, grid, shifts.back(), mode);
    ValueSequence w = solve_hj_backward(spec, pot, terminal);

    ValueSequence U{spec.horizon, {}, "shift"};
    U.fields.reserve(w.fields.size());
    for (int k = 0; k < N; ++k) U.fields.push_back(shift_sample(w.at(k), -shifts[std::size_t(k)]));
    U.fields.push_back(sample_entry(spec.terminal, spec.dim, grid, Vec{}, mode));
    return ValueField{std::move(U), path.seed(), path.level(), SolveMethod::shift, std::move(w)};
}

ValueField solve_by_splitting(const ProblemSpec& spec, const BrownianPath& path,
                              const SpaceGrid& grid, BoundaryMode mode) {
    check_inputs(spec, path, grid);
    const TimeGrid& tg = spec.horizon;
    const int N = tg.steps();
    const double sn = std::sqrt(spec.nu);
    const HJStepper stepper(spec, grid, tg.delta());
    const auto running =
        running_cost(TimeDependentPotential::fixed(spec.potential, spec.dim, tg), 0, grid, tg.delta());

    std::vector<ScalarField> fields(std::size_t(N) + 1,
                                    sample_entry(spec.terminal, spec.dim, grid, Vec{}, mode));
    for (int k = N - 1; k >= 0; --k) {
        const ScalarField H = stepper.step(fields[std::size_t(k) + 1], running);
        fields[std::size_t(k)] = shift_sample(H, path.increment(k) * sn);
    }
    return ValueField{ValueSequence{tg, std::move(fields), "splitting"}, path.seed(), path.level(),
                      SolveMethod::splitting};
}

ValueField solve_value(SolveMethod method, const ProblemSpec& spec, const BrownianPath& path,
                       const SpaceGrid& grid) {
    return method == SolveMethod::shift ? solve_by_shift(spec, path, grid)
                                        : solve_by_splitting(spec, path, grid);
}

double dpp_residual(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                    int t_index, const Vec& x, int m) {
    const TimeGrid& tg = vf.time();
    if (m < 1 || t_index < 0 || t_index + m > tg.steps()) {
        throw ConfigError("dpp window must satisfy 1 <= m and t_index + m <= N");
    }
    const ControlLattice lattice(spec.dim, spec.control_bound, spec.lattice_K, spec.lagrangian);
    const double delta = tg.delta();
    const double step = delta * lattice.spacing();
    const double sn = std::sqrt(spec.nu);
    const int K = spec.lattice_K;
    const int R = m * K;          // largest reachable index per axis
    const int W = 2 * R + 1;      // table width per axis
    const int jmax = spec.dim == 2 ? 1 : 0;
    const std::size_t table = spec.dim == 2 ? std::size_t(W) * W : std::size_t(W);

    auto state = [&](int j, int i1, int i2) {
        const Vec noise = (path.at(t_index + j) - path.at(t_index)) * sn;
        return x + Vec{i1 * step, i2 * step} + noise;
    };
    // In 1-D the second index is always 0 and jmax = 0 drops it.
    auto slot = [&](int i1, int i2) {
        return std::size_t(i1 + R) + std::size_t(W) * std::size_t((i2 + R) * jmax);
    };

    std::vector<double> next(table), cur(table);
    const ScalarField& end = vf.at(t_index + m);
    for (int i2 = -R * jmax; i2 <= R * jmax; ++i2)
        for (int i1 = -R; i1 <= R; ++i1) next[slot(i1, i2)] = interpolate(end, state(m, i1, i2));

    for (int j = m - 1; j >= 0; --j) {
        const int r = j * K;
        for (int i2 = -r * jmax; i2 <= r * jmax; ++i2) {
            for (int i1 = -r; i1 <= r; ++i1) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < lattice.size(); ++c) {
                    const auto& idx = lattice.index(c);
                    const double val = delta * lattice.cost(c) + next[slot(i1 + idx[0], i2 + idx[1])];
                    best = std::min(best, val);
                }
                best += delta * catalog_value(spec.potential, state(j, i1, i2), spec.dim);
                cur[slot(i1, i2)] = best;
            }
        }
        std::swap(cur, next);
    }
    return std::abs(interpolate(vf.at(t_index), x) - next[slot(0, 0)]);
}

bool has_closed_form(const ProblemSpec& spec) {
    const auto vk = spec.potential.kind;
    const auto sk = spec.terminal.kind;
    const bool v_ok = vk == CatalogKind::zero || vk == CatalogKind::constant;
    const bool s_ok = sk == CatalogKind::zero || sk == CatalogKind::constant ||
                      sk == CatalogKind::linear ||
                      (sk == CatalogKind::quadratic && spec.terminal.kappa >= 0.0);
    return v_ok && s_ok && spec.lagrangian.kind == LagrangianKind::quadratic;
}

namespace {

struct Characteristic {
    double tau;
    Vec a;  ///< x + sqrt(nu) (W_T - W_t)
};

Characteristic characteristic(const ProblemSpec& spec, const BrownianPath& path, int k, const Vec& x) {
    const int N = path.grid().steps();
    return {path.grid().T() - path.grid().node(k), x + (path.at(N) - path.at(k)) * std::sqrt(spec.nu)};
}

Vec masked(Vec v, int dim) {
    if (dim == 1) v[1] = 0.0;
    return v;
}

}  // namespace

std::optional<double> closed_form_value(const ProblemSpec& spec, const BrownianPath& path, int k,
                                        const Vec& x) {
    if (!has_closed_form(spec)) return std::nullopt;
    const auto [tau, a] = characteristic(spec, path, k, x);
    const double running = spec.potential.kind == CatalogKind::constant ? spec.potential.offset * tau : 0.0;
    const CatalogEntry& S = spec.terminal;
    switch (S.kind) {
        case CatalogKind::zero: return running;
        case CatalogKind::constant: return running + S.offset;
        case CatalogKind::linear: {
            const Vec p = masked(S.a, spec.dim);
            return running + dot(p, a) - 0.5 * norm2(p) * tau + S.offset;
        }
        case CatalogKind::quadratic:
            return running + S.kappa * norm2(a) / (2.0 * (1.0 + S.kappa * tau)) + S.offset;
        default: return std::nullopt;
    }
}

std::optional<Vec> closed_form_drift(const ProblemSpec& spec, const BrownianPath& path, int k,
                                     const Vec& x) {
    if (!has_closed_form(spec)) return std::nullopt;
    const auto [tau, a] = characteristic(spec, path, k, x);
    switch (spec.terminal.kind) {
        case CatalogKind::linear: return -masked(spec.terminal.a, spec.dim);
        case CatalogKind::quadratic:
            return a * (-spec.terminal.kappa / (1.0 + spec.terminal.kappa * tau));
        default: return Vec{};
    }
}

double closed_form_error(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                         double core_fraction) {
    if (!has_closed_form(spec)) throw ConfigError("problem has no closed-form value");
    const SpaceGrid& g = vf.space();
    const auto core = CoreRegion::of(g, core_fraction).nodes(g);
    double err = 0.0;
    for (int k = 0; k <= vf.time().steps(); ++k) {
        for (std::size_t n : core) {
            const double exact = *closed_form_value(spec, path, k, g.point(n));
            err = std::max(err, std::abs(vf.at(k)[n] - exact));
        }
    }
    return err;
}

double closed_form_magnitude(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                             double core_fraction) {
    if (!has_closed_form(spec)) throw ConfigError("problem has no closed-form value");
    const SpaceGrid& g = vf.space();
    const auto core = CoreRegion::of(g, core_fraction).nodes(g);
    double mag = 0.0;
    for (int k = 0; k <= vf.time().steps(); ++k)
        for (std::size_t n : core) mag = std::max(mag, std::abs(*closed_form_value(spec, path, k, g.point(n))));
    return mag;
}

double core_gap(const ValueField& a, const ValueField& b, double core_fraction) {
    if (!(a.space() == b.space()) || !(a.time() == b.time())) {
        throw ConfigError("value fields live on different grids");
    }
    const auto core = CoreRegion::of(a.space(), core_fraction).nodes(a.space());
    double gap = 0.0;
    for (int k = 0; k <= a.time().steps(); ++k)
        for (std::size_t n : core) gap = std::max(gap, std::abs(a.at(k)[n] - b.at(k)[n]));
    return gap;
}

}  // namespace pathwise
