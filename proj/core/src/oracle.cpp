#include "pathwise/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathwise/errors.hpp"

namespace pathwise {

ControlPath ControlPath::constant(const TimeGrid& grid, int t_index, const Vec& u, double bound) {
    return ControlPath{grid, t_index, std::vector<Vec>(std::size_t(grid.steps() - t_index), u), bound};
}

void ControlPath::validate() const {
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (norm(u[k]) > bound * (1.0 + 1e-12)) {
            throw PreconditionError("control step " + std::to_string(k) + " leaves the ball |u| <= C");
        }
    }
}

std::string to_string(OracleMode m) {
    switch (m) {
        case OracleMode::automatic: return "auto";
        case OracleMode::enumeration: return "enumeration";
        case OracleMode::lattice_dp: return "lattice-dp";
    }
    return "unknown";
}

OracleMode oracle_mode_from_string(const std::string& name) {
    if (name == "auto") return OracleMode::automatic;
    if (name == "enumeration") return OracleMode::enumeration;
    if (name == "lattice-dp") return OracleMode::lattice_dp;
    throw ConfigError("unknown oracle mode '" + name + "'");
}

StatePath simulate_state(const ProblemSpec& spec, const BrownianPath& path,
                         const ControlPath& control, int t_index, const Vec& x) {
    const TimeGrid& tg = path.grid();
    if (!(control.grid == tg) || control.t_index != t_index ||
        control.u.size() != std::size_t(tg.steps() - t_index)) {
        throw ConfigError("control path does not cover the path grid from the start node");
    }
    const double sn = std::sqrt(spec.nu);
    const double delta = tg.delta();
    StatePath state{tg, t_index, {x}, false};
    state.z.reserve(control.u.size() + 1);
    for (int k = t_index; k < tg.steps(); ++k) {
        state.z.push_back(state.z.back() + control.u[std::size_t(k - t_index)] * delta +
                          path.increment(k) * sn);
    }
    return state;
}

double evaluate_cost(const ProblemSpec& spec, const StatePath& state, const ControlPath& control) {
    if (state.z.size() != control.u.size() + 1) throw ConfigError("state and control lengths differ");
    const double delta = state.grid.delta();
    double J = 0.0;
    for (std::size_t k = 0; k < control.u.size(); ++k) {
        J += delta * (spec.lagrangian(control.u[k]) + catalog_value(spec.potential, state.z[k], spec.dim));
    }
    return J + catalog_value(spec.terminal, state.z.back(), spec.dim);
}

namespace {

OracleResult enumerate(const ProblemSpec& spec, const BrownianPath& path, int t_index, const Vec& x,
                       const ControlLattice& lattice, double C) {
    const TimeGrid& tg = path.grid();
    const int n = tg.steps() - t_index;
    const double delta = tg.delta();
    const double sn = std::sqrt(spec.nu);
    const std::size_t P = lattice.size();

    const auto steps = std::size_t(n);
    std::vector<Vec> noise(steps);
    for (int d = 0; d < n; ++d) noise[std::size_t(d)] = path.increment(t_index + d) * sn;

    // Depth-first walk with per-depth state, running cost and lattice choice.
    std::vector<Vec> z(steps + 1);
    std::vector<double> cost(steps + 1), pot(steps);
    std::vector<std::size_t> choice(steps, 0), best_choice(steps, 0);
    z[0] = x;
    cost[0] = 0.0;
    double best = std::numeric_limits<double>::infinity();

    int d = 0;
    pot[0] = catalog_value(spec.potential, x, spec.dim);
    choice[0] = 0;
    while (d >= 0) {
        const auto du = std::size_t(d);
        if (choice[du] == P) {
            --d;
            if (d >= 0) ++choice[std::size_t(d)];
            continue;
        }
        const std::size_t c = choice[du];
        z[du + 1] = z[du] + lattice.point(c) * delta + noise[du];
        cost[du + 1] = cost[du] + delta * (lattice.cost(c) + pot[du]);
        if (d + 1 == n) {
            const double J = cost[du + 1] + catalog_value(spec.terminal, z[du + 1], spec.dim);
            if (J < best) {
                best = J;
                best_choice = choice;
            }
            ++choice[du];
        } else {
            ++d;
            pot[std::size_t(d)] = catalog_value(spec.potential, z[std::size_t(d)], spec.dim);
            choice[std::size_t(d)] = 0;
        }
    }

    ControlPath ctrl{tg, t_index, {}, C};
    for (std::size_t c : best_choice) ctrl.u.push_back(lattice.point(c));
    return OracleResult{best, OracleMode::enumeration, lattice.K(), C, std::pow(double(P), n), ctrl};
}

// Nearest integer with exact halves rounded toward zero.
long snap_index(double s) {
    const double f = std::floor(s);
    const double frac = s - f;
    if (frac > 0.5) return long(f) + 1;
    if (frac < 0.5) return long(f);
    return f >= 0.0 ? long(f) : long(f) + 1;
}

OracleResult lattice_dp(const ProblemSpec& spec, const BrownianPath& path, int t_index, const Vec& x,
                        const ControlLattice& lattice, double C) {
    const TimeGrid& tg = path.grid();
    const int n = tg.steps() - t_index;
    const double delta = tg.delta();
    const double sn = std::sqrt(spec.nu);
    const int K = lattice.K();
    const double s = delta * lattice.spacing();  // state lattice spacing in the shifted frame
    const int R = n * K;
    const int W = 2 * R + 1;
    const int jm = spec.dim == 2 ? 1 : 0;
    const std::size_t table = spec.dim == 2 ? std::size_t(W) * W : std::size_t(W);
    auto slot = [&](long i1, long i2) {
        return std::size_t(i1 + R) + std::size_t(W) * std::size_t((i2 + R) * jm);
    };
    // Shifted-frame state y = x + s i; original-frame state adds the path noise.
    auto original = [&](int j, long i1, long i2) {
        return x + Vec{s * double(i1), s * double(i2)} + (path.at(t_index + j) - path.at(t_index)) * sn;
    };

    std::vector<double> next(table), cur(table);
    const auto steps = std::size_t(n);
    std::vector<std::vector<std::uint32_t>> argmin(steps, std::vector<std::uint32_t>(table));
    for (long i2 = -R * jm; i2 <= R * jm; ++i2)
        for (long i1 = -R; i1 <= R; ++i1)
            next[slot(i1, i2)] = catalog_value(spec.terminal, original(n, i1, i2), spec.dim);

    for (int j = n - 1; j >= 0; --j) {
        const long r = long(j) * K;
        for (long i2 = -r * jm; i2 <= r * jm; ++i2) {
            for (long i1 = -r; i1 <= r; ++i1) {
                const Vec y = x + Vec{s * double(i1), s * double(i2)};
                double best = std::numeric_limits<double>::infinity();
                std::uint32_t arg = 0;
                for (std::size_t c = 0; c < lattice.size(); ++c) {
                    const Vec yn = y + lattice.point(c) * delta;
                    const long n1 = snap_index((yn[0] - x[0]) / s);
                    const long n2 = jm ? snap_index((yn[1] - x[1]) / s) : 0;
                    const double val = delta * lattice.cost(c) + next[slot(n1, n2)];
                    if (val < best) {
                        best = val;
                        arg = std::uint32_t(c);
                    }
                }
                cur[slot(i1, i2)] =
                    best + delta * catalog_value(spec.potential, original(j, i1, i2), spec.dim);
                argmin[std::size_t(j)][slot(i1, i2)] = arg;
            }
        }
        std::swap(cur, next);
    }

    ControlPath ctrl{tg, t_index, {}, C};
    long i1 = 0, i2 = 0;
    for (int j = 0; j < n; ++j) {
        const std::size_t c = argmin[std::size_t(j)][slot(i1, i2)];
        ctrl.u.push_back(lattice.point(c));
        i1 += lattice.index(c)[0];
        i2 += lattice.index(c)[1];
    }
    return OracleResult{next[slot(0, 0)], OracleMode::lattice_dp, K, C,
                        std::pow(double(lattice.size()), n), ctrl};
}

}  // namespace

OracleResult brute_force_value(const ProblemSpec& spec, const BrownianPath& path, int t_index,
                               const Vec& x, const OracleOptions& options) {
    spec.validate();
    if (!(path.grid() == spec.horizon) || path.dim() != spec.dim) {
        throw ConfigError("Brownian path does not match the problem horizon/dimension");
    }
    if (t_index < 0 || t_index >= path.grid().steps()) throw ConfigError("start node out of range");
    const double C = options.control_bound > 0.0 ? options.control_bound : spec.control_bound;
    const ControlLattice lattice(spec.dim, C, options.K_ctrl, spec.lagrangian);
    const int n = path.grid().steps() - t_index;
    const double count = std::pow(double(lattice.size()), n);

    OracleMode mode = options.mode;
    if (mode == OracleMode::automatic) {
        mode = count <= options.budget ? OracleMode::enumeration : OracleMode::lattice_dp;
    }
    if (mode == OracleMode::enumeration) {
        if (count > options.budget) {
            throw BudgetExceeded("enumeration needs " + std::to_string(count) +
                                 " sequences, above the budget; switch to lattice-dp mode");
        }
        return enumerate(spec, path, t_index, x, lattice, C);
    }
    return lattice_dp(spec, path, t_index, x, lattice, C);
}

std::vector<Vec> cost_gradient(const ProblemSpec& spec, const StatePath& state,
                               const ControlPath& control) {
    const double delta = state.grid.delta();
    const std::size_t n = control.u.size();
    std::vector<Vec> g(n);
    Vec lambda = catalog_eval(spec.terminal, state.z[n], spec.dim).gradient;
    for (std::size_t k = n; k-- > 0;) {
        g[k] = (spec.lagrangian.gradient(control.u[k]) + lambda) * delta;
        lambda += catalog_eval(spec.potential, state.z[k], spec.dim).gradient * delta;
    }
    if (spec.dim == 1)
        for (auto& v : g) v[1] = 0.0;
    return g;
}

DescentResult descent_refine(const ProblemSpec& spec, const BrownianPath& path, int t_index,
                             const Vec& x, const ControlPath& init, int max_iterations,
                             double step_tolerance) {
    init.validate();
    const double C = init.bound;
    const double delta = path.grid().delta();
    ControlPath u = init;
    double J = evaluate_cost(spec, simulate_state(spec, path, u, t_index, x), u);
    DescentResult out{u, J, {J}, 0};

    for (int it = 0; it < max_iterations; ++it) {
        const auto g = cost_gradient(spec, simulate_state(spec, path, u, t_index, x), u);
        bool accepted = false;
        double moved = 0.0;
        for (double alpha = 1.0; alpha > 1e-14; alpha *= 0.5) {
            ControlPath trial = u;
            moved = 0.0;
            for (std::size_t k = 0; k < trial.u.size(); ++k) {
                trial.u[k] = project_to_ball(u.u[k] - g[k] * (alpha / delta), C);
                moved = std::max(moved, norm(trial.u[k] - u.u[k]));
            }
            const double Jt = evaluate_cost(spec, simulate_state(spec, path, trial, t_index, x), trial);
            if (Jt < J) {
                u = std::move(trial);
                J = Jt;
                accepted = true;
                break;
            }
            if (moved < step_tolerance) break;
        }
        out.iterations = it + 1;
        if (!accepted) break;
        out.history.push_back(J);
        if (moved < step_tolerance) break;
    }
    out.control = u;
    out.cost = J;
    return out;
}

}  // namespace pathwise
