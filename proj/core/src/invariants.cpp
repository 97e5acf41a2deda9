#include "pathwise/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

std::string to_string(SymmetryKind k) {
    switch (k) {
        case SymmetryKind::time_translation: return "time-translation";
        case SymmetryKind::rotation: return "rotation";
        case SymmetryKind::custom: return "custom";
    }
    return "unknown";
}

bool is_antisymmetric(const Mat2& A, double tol) {
    return std::abs(A(0, 0)) <= tol && std::abs(A(1, 1)) <= tol &&
           std::abs(A(0, 1) + A(1, 0)) <= tol;
}

SymmetryField SymmetryField::time_translation() {
    SymmetryField s;
    s.kind = SymmetryKind::time_translation;
    s.T = [](double) { return 1.0; };
    s.T_dot = [](double) { return 0.0; };
    s.X = [](double, const Vec&) { return Vec{}; };
    s.X_s = [](double, const Vec&) { return Vec{}; };
    s.X_jac = [](double, const Vec&) { return Mat2{}; };
    s.X_lap = [](double, const Vec&) { return Vec{}; };
    return s;
}

SymmetryField SymmetryField::rotation(double omega) {
    Mat2 A;
    A(0, 1) = -omega;
    A(1, 0) = omega;
    return rotation(A);
}

SymmetryField SymmetryField::rotation(const Mat2& A) {
    if (!is_antisymmetric(A)) throw ConfigError("rotation generator must satisfy A^T = -A");
    SymmetryField s;
    s.kind = SymmetryKind::rotation;
    s.T = [](double) { return 0.0; };
    s.T_dot = [](double) { return 0.0; };
    s.X = [A](double, const Vec& x) { return A.apply(x); };
    s.X_s = [](double, const Vec&) { return Vec{}; };
    s.X_jac = [A](double, const Vec&) { return A; };
    s.X_lap = [](double, const Vec&) { return Vec{}; };
    return s;
}

double strat_integral(std::span<const Vec> samples, const BrownianPath& path, int k0, int k1) {
    if (k0 < 0 || k1 > path.grid().steps() || k0 > k1) {
        throw ConfigError("integration range outside the path grid");
    }
    if (samples.size() != std::size_t(k1 - k0) + 1) {
        throw ConfigError("strat_integral needs one sample per node of the range");
    }
    double sum = 0.0;
    for (int k = k0; k < k1; ++k) {
        const auto i = std::size_t(k - k0);
        sum += dot((samples[i] + samples[i + 1]) * 0.5, path.increment(k));
    }
    return sum;
}

double QuantityTrace::max_abs_residual() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, std::abs(r));
    return m;
}

double QuantityTrace::max_abs_Q() const {
    double m = 0.0;
    for (double q : Q) m = std::max(m, std::abs(q));
    return m;
}

QuantityTrace conserved_quantity(const SymmetryField& sym, const DriftField& drift,
                                 const StatePath& state, const BrownianPath& path,
                                 const ProblemSpec& spec) {
    const TimeGrid& tg = state.grid;
    const int k0 = state.t_index;
    const int N = tg.steps();
    const double delta = tg.delta();
    const double sn = std::sqrt(spec.nu);
    const double half_nu = 0.5 * spec.nu;

    QuantityTrace trace{tg, k0, {}, {}, {}};
    Vec prev_coeff{};
    double noise = 0.0;
    double ito_bv = 0.0;      // sum delta (nu/2) T lap V
    double correction = 0.0;  // sum delta (nu/2) (T lap V + <lap X, u*>)
    for (int k = k0; k <= N; ++k) {
        const double s = tg.node(k);
        const Vec& z = state.at_node(k);
        const Vec u = interpolate(drift.at(k), z);
        const CatalogValue V = catalog_eval(spec.potential, z, spec.dim);
        const double T = sym.T(s);
        const Vec coeff = (sym.X_jac(s, z).apply_transposed(u) + V.gradient * T) * sn;
        if (k > k0) noise += dot((prev_coeff + coeff) * 0.5, path.increment(k - 1));
        prev_coeff = coeff;

        trace.Q.push_back(dot(sym.X(s, z), u) - T * (0.5 * norm2(u) - V.value));
        trace.noise.push_back(noise);
        trace.residual.push_back(trace.Q.back() - trace.Q.front() - noise - ito_bv + correction);
        ito_bv += delta * half_nu * T * V.laplacian;
        correction += delta * half_nu * (T * V.laplacian + dot(sym.X_lap(s, z), u));
    }
    return trace;
}

double symmetry_residual(const SymmetryField& sym, const DriftField& drift, const StatePath& state,
                         const ProblemSpec& spec, double guard) {
    double worst = 0.0;
    for (int k = state.t_index; k <= state.grid.steps(); ++k) {
        const Vec& z = state.at_node(k);
        if (guard > 0.0 && norm(z) <= guard) continue;
        const double s = state.grid.node(k);
        const Vec p = interpolate(drift.at(k), z);
        const CatalogValue V = catalog_eval(spec.potential, z, spec.dim);
        const Vec DX = sym.X_s(s, z) + sym.X_jac(s, z).apply(p) + sym.X_lap(s, z) * (0.5 * spec.nu);
        const double r = dot(p, DX) - (0.5 * norm2(p) - V.value) * sym.T_dot(s) +
                         dot(V.gradient, sym.X(s, z));
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

void write_trace_csv(std::ostream& out, const QuantityTrace& trace) {
    out << "k,t,Q,noise_integral,residual\n";
    for (std::size_t i = 0; i < trace.Q.size(); ++i) {
        const int k = trace.t_index + int(i);
        out << k << ',' << format_double(trace.grid.node(k)) << ',' << format_double(trace.Q[i])
            << ',' << format_double(trace.noise[i]) << ',' << format_double(trace.residual[i]) << '\n';
    }
}

}  // namespace pathwise
