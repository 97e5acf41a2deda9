#include "pathwise/drift_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

DriftField extract_drift(const ValueField& vf, const ProblemSpec& spec, bool strict,
                         double core_fraction) {
    const SpaceGrid& g = vf.space();
    const CoreRegion core = CoreRegion::of(g, core_fraction);
    const double C = spec.control_bound;
    DriftField out{vf.time(), {}, vf.seed};
    out.fields.reserve(std::size_t(vf.time().steps()) + 1);
    for (int k = 0; k <= vf.time().steps(); ++k) {
        VectorField u = gradient(vf.at(k));
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            u[n] = -u[n];
            if (norm(u[n]) > C) {
                u[n] = project_to_ball(u[n], C);
                ++out.clamped_nodes;
                if (core.contains_node(g, n)) ++out.clamped_core_nodes;
            }
        }
        out.fields.push_back(std::move(u));
    }
    if (vf.shifted_frame) {
        out.shifted.emplace();
        for (const ScalarField& w : vf.shifted_frame->fields) {
            VectorField u = gradient(w);
            for (auto& v : u.values()) v = project_to_ball(-v, C);
            out.shifted->push_back(std::move(u));
        }
    }
    if (strict && out.clamped_core_nodes > 0) {
        throw PreconditionError(std::to_string(out.clamped_core_nodes) +
                                " core nodes needed drift clamping; the control bound C is too small");
    }
    return out;
}

std::string to_string(Integrator i) { return i == Integrator::euler ? "euler" : "heun"; }

Integrator integrator_from_string(const std::string& name) {
    if (name == "euler") return Integrator::euler;
    if (name == "heun") return Integrator::heun;
    throw ConfigError("unknown integrator '" + name + "'");
}

StatePath simulate_optimal(const ProblemSpec& spec, const BrownianPath& path,
                           const DriftField& drift, int t_index, const Vec& x, Integrator scheme) {
    const TimeGrid& tg = drift.grid;
    if (!(path.grid() == tg)) throw ConfigError("drift field and Brownian path grids differ");
    if (t_index < 0 || t_index > tg.steps()) throw ConfigError("start node out of range");
    const double sn = std::sqrt(spec.nu);
    const double delta = tg.delta();
    const SpaceGrid& g = drift.space();
    StatePath state{tg, t_index, {x}, !g.contains(x)};
    for (int k = t_index; k < tg.steps(); ++k) {
        const Vec z = state.z.back();
        const Vec noise = path.increment(k) * sn;
        const Vec u0 = interpolate(drift.at(k), z);
        Vec zn = z + u0 * delta + noise;
        if (scheme == Integrator::heun) {
            const Vec u1 = interpolate(drift.at(k + 1), zn);
            zn = z + (u0 + u1) * (0.5 * delta) + noise;
        }
        if (spec.dim == 1) zn[1] = 0.0;
        if (!g.contains(zn)) state.truncated = true;
        state.z.push_back(zn);
    }
    return state;
}

MomentumResidual momentum_residual(const DriftField& drift, const StatePath& state,
                                   const ProblemSpec& spec) {
    const double delta = state.grid.delta();
    const int N = state.grid.steps();
    const Vec u0 = interpolate(drift.at(state.t_index), state.at_node(state.t_index));
    Vec acc{};
    double path_res = 0.0;
    for (int k = state.t_index; k <= N; ++k) {
        const Vec& z = state.at_node(k);
        path_res = std::max(path_res, norm(interpolate(drift.at(k), z) - u0 - acc));
        acc += catalog_eval(spec.potential, z, spec.dim).gradient * delta;
    }
    const Vec& zN = state.at_node(N);
    const double term =
        norm(interpolate(drift.at(N), zN) + catalog_eval(spec.terminal, zN, spec.dim).gradient);
    return MomentumResidual{path_res, term};
}

double drift_spde_residual(const DriftField& drift, const BrownianPath& path,
                           const ProblemSpec& spec, double core_fraction) {
    const TimeGrid& tg = drift.grid;
    if (!(path.grid() == tg)) throw ConfigError("drift field and Brownian path grids differ");
    const SpaceGrid& g = drift.space();
    const int M = g.nodes_per_axis();
    const double h = g.spacing();
    const double delta = tg.delta();
    const double sn = std::sqrt(spec.nu);
    const int N = tg.steps();

    std::vector<Vec> shift(std::size_t(N) + 1);
    for (int k = 0; k <= N; ++k) shift[std::size_t(k)] = (path.at(k) - path.at(0)) * sn;

    std::vector<std::size_t> nodes;
    for (std::size_t n : CoreRegion::of(g, core_fraction).nodes(g)) {
        bool interior = true;
        for (int a = 0; a < g.dim(); ++a) {
            const int i = g.axis_index(n, a);
            interior = interior && i > 0 && i < M - 1;
        }
        if (interior) nodes.push_back(n);
    }

    auto tilde = [&](int k) {
        return drift.shifted ? (*drift.shifted)[std::size_t(k)]
                             : shift_sample(drift.at(k), shift[std::size_t(k)]);
    };
    double worst = 0.0;
    VectorField cur = tilde(0);
    for (int k = 0; k < N; ++k) {
        VectorField nxt = tilde(k + 1);
        for (std::size_t n : nodes) {
            const Vec u = cur[n];
            Vec adv{};
            for (int a = 0; a < g.dim(); ++a) {
                const std::size_t stride = a == 0 ? 1 : std::size_t(M);
                const Vec du = (cur[n + stride] - cur[n - stride]) * (1.0 / (2.0 * h));
                adv += du * u[std::size_t(a)];
            }
            const Vec gradV = catalog_eval(spec.potential, g.point(n) + shift[std::size_t(k)], spec.dim).gradient;
            const Vec r = (nxt[n] - u) * (1.0 / delta) + adv - gradV;
            worst = std::max(worst, norm(r));
        }
        cur = std::move(nxt);
    }
    return worst;
}

double terminal_drift_gap(const DriftField& drift, const ProblemSpec& spec) {
    const SpaceGrid& g = drift.space();
    const int M = g.nodes_per_axis();
    const VectorField& uT = drift.at(drift.grid.steps());
    double gap = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        bool interior = true;
        for (int a = 0; a < g.dim(); ++a) {
            const int i = g.axis_index(n, a);
            interior = interior && i > 0 && i < M - 1;
        }
        if (!interior) continue;
        const Vec gradS = catalog_eval(spec.terminal, g.point(n), spec.dim).gradient;
        gap = std::max(gap, norm(uT[n] + gradS));
    }
    return gap;
}

void write_trajectory_csv(std::ostream& out, const StatePath& state, const DriftField& drift) {
    const int dim = drift.space().dim();
    out << (dim == 1 ? "k,t,z_1,ustar_1\n" : "k,t,z_1,z_2,ustar_1,ustar_2\n");
    for (int k = state.t_index; k <= state.grid.steps(); ++k) {
        const Vec& z = state.at_node(k);
        const Vec u = interpolate(drift.at(k), z);
        out << k << ',' << format_double(state.grid.node(k)) << ',' << format_double(z[0]);
        if (dim == 2) out << ',' << format_double(z[1]);
        out << ',' << format_double(u[0]);
        if (dim == 2) out << ',' << format_double(u[1]);
        out << '\n';
    }
}

}  // namespace pathwise
