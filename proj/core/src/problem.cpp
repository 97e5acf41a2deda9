#include "pathwise/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

CatalogEntry CatalogEntry::constant(double c) {
    CatalogEntry e;
    e.kind = CatalogKind::constant;
    e.offset = c;
    return e;
}

CatalogEntry CatalogEntry::linear(Vec a, double offset) {
    CatalogEntry e;
    e.kind = CatalogKind::linear;
    e.a = a;
    e.offset = offset;
    return e;
}

CatalogEntry CatalogEntry::cosine(double kappa, Vec k, double phase, double offset) {
    CatalogEntry e;
    e.kind = CatalogKind::cosine;
    e.kappa = kappa;
    e.k = k;
    e.phase = phase;
    e.offset = offset;
    return e;
}

CatalogEntry CatalogEntry::quadratic(double kappa, double offset) {
    CatalogEntry e;
    e.kind = CatalogKind::quadratic;
    e.kappa = kappa;
    e.offset = offset;
    return e;
}

CatalogEntry CatalogEntry::radial_cosine(double kappa, double offset) {
    CatalogEntry e;
    e.kind = CatalogKind::radial_cosine;
    e.kappa = kappa;
    e.offset = offset;
    return e;
}

CatalogEntry CatalogEntry::plus(double c) const {
    CatalogEntry e = *this;
    if (e.kind == CatalogKind::zero) e.kind = CatalogKind::constant;
    e.offset += c;
    return e;
}

std::string to_string(CatalogKind kind) {
    switch (kind) {
        case CatalogKind::zero: return "zero";
        case CatalogKind::constant: return "constant";
        case CatalogKind::linear: return "linear";
        case CatalogKind::cosine: return "cosine";
        case CatalogKind::quadratic: return "quadratic";
        case CatalogKind::radial_cosine: return "radial_cosine";
    }
    return "unknown";
}

CatalogKind catalog_kind_from_string(const std::string& id) {
    for (CatalogKind k : {CatalogKind::zero, CatalogKind::constant, CatalogKind::linear,
                          CatalogKind::cosine, CatalogKind::quadratic, CatalogKind::radial_cosine}) {
        if (to_string(k) == id) return k;
    }
    throw ConfigError("unknown catalog identifier '" + id + "'");
}

std::string CatalogEntry::id() const {
    std::string s = to_string(kind);
    switch (kind) {
        case CatalogKind::zero: break;
        case CatalogKind::constant: s += "(" + format_double(offset) + ")"; break;
        case CatalogKind::linear:
            s += "(a=" + format_double(a[0]) + ";" + format_double(a[1]) +
                 ",offset=" + format_double(offset) + ")";
            break;
        case CatalogKind::cosine:
            s += "(kappa=" + format_double(kappa) + ",k=" + format_double(k[0]) + ";" +
                 format_double(k[1]) + ",phase=" + format_double(phase) +
                 ",offset=" + format_double(offset) + ")";
            break;
        case CatalogKind::quadratic:
        case CatalogKind::radial_cosine:
            s += "(kappa=" + format_double(kappa) + ",offset=" + format_double(offset) + ")";
            break;
    }
    return s;
}

bool CatalogEntry::bounded() const {
    return kind != CatalogKind::linear && kind != CatalogKind::quadratic;
}

bool CatalogEntry::lipschitz() const { return kind != CatalogKind::quadratic; }

bool CatalogEntry::harmonic() const {
    return kind == CatalogKind::zero || kind == CatalogKind::constant || kind == CatalogKind::linear;
}

double CatalogEntry::gradient_bound(double radius) const {
    switch (kind) {
        case CatalogKind::zero:
        case CatalogKind::constant: return 0.0;
        case CatalogKind::linear: return norm(a);
        case CatalogKind::cosine: return std::abs(kappa) * norm(k);
        case CatalogKind::quadratic: return std::abs(kappa) * radius;
        case CatalogKind::radial_cosine: return std::abs(kappa);
    }
    return 0.0;
}

double CatalogEntry::hessian_bound() const {
    switch (kind) {
        case CatalogKind::zero:
        case CatalogKind::constant:
        case CatalogKind::linear: return 0.0;
        case CatalogKind::cosine: return std::abs(kappa) * norm2(k);
        case CatalogKind::quadratic: return std::abs(kappa);
        case CatalogKind::radial_cosine: return std::abs(kappa);
    }
    return 0.0;
}

CatalogValue catalog_eval(const CatalogEntry& e, const Vec& x, int dim) {
    switch (e.kind) {
        case CatalogKind::zero: return {0.0, Vec{}, 0.0};
        case CatalogKind::constant: return {e.offset, Vec{}, 0.0};
        case CatalogKind::linear: {
            Vec a = e.a;
            if (dim == 1) a[1] = 0.0;
            return {dot(a, x) + e.offset, a, 0.0};
        }
        case CatalogKind::cosine: {
            Vec k = e.k;
            if (dim == 1) k[1] = 0.0;
            const double arg = dot(k, x) + e.phase;
            const double c = std::cos(arg);
            return {e.kappa * c + e.offset, k * (-e.kappa * std::sin(arg)), -e.kappa * norm2(k) * c};
        }
        case CatalogKind::quadratic:
            return {0.5 * e.kappa * norm2(x) + e.offset, x * e.kappa, e.kappa * dim};
        case CatalogKind::radial_cosine: {
            const double r = norm(x);
            const double c = std::cos(r);
            if (r < 1e-8) {
                // Limits as r -> 0: grad -> 0, laplacian -> -kappa * dim.
                return {e.kappa * c + e.offset, x * (-e.kappa), -e.kappa * dim};
            }
            const double s = std::sin(r);
            return {e.kappa * c + e.offset, x * (-e.kappa * s / r),
                    -e.kappa * (c + (dim - 1) * s / r)};
        }
    }
    throw ConfigError("unhandled catalog kind");
}

double Lagrangian::operator()(const Vec& u) const {
    return kind == LagrangianKind::quadratic ? 0.5 * norm2(u) : weight * norm(u);
}

Vec Lagrangian::gradient(const Vec& u) const {
    if (kind == LagrangianKind::quadratic) return u;
    const double n = norm(u);
    return n > 0.0 ? u * (weight / n) : Vec{};
}

std::string Lagrangian::id() const {
    return kind == LagrangianKind::quadratic ? "quadratic" : "euclidean(" + format_double(weight) + ")";
}

Lagrangian lagrangian_from_string(const std::string& id, double weight) {
    if (id == "quadratic") return Lagrangian{LagrangianKind::quadratic, 1.0};
    if (id == "euclidean") {
        if (!(weight > 0.0)) throw ConfigError("euclidean Lagrangian needs a positive weight");
        return Lagrangian{LagrangianKind::euclidean, weight};
    }
    throw ConfigError("unknown Lagrangian '" + id + "'");
}

void ProblemSpec::validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("problem dimension must be 1 or 2");
    if (!(nu > 0.0)) throw ConfigError("noise level nu must be positive");
    if (!(control_bound > 0.0)) throw ConfigError("control bound C must be positive");
    if (lattice_K < 1) throw ConfigError("control lattice needs K >= 1");
}

std::vector<std::string> ProblemSpec::provenance_warnings() const {
    std::vector<std::string> out;
    if (!potential.bounded() || !potential.lipschitz()) {
        out.push_back("potential " + potential.id() +
                      " is not bounded Lipschitz; admitted for closed-form comparison only");
    }
    if (!terminal.lipschitz()) {
        out.push_back("terminal cost " + terminal.id() +
                      " is not Lipschitz; admitted for closed-form comparison only");
    }
    return out;
}

double default_control_bound(const CatalogEntry& potential, const CatalogEntry& terminal,
                             double nu, const TimeGrid& horizon, double box_radius) {
    const double r = box_radius + 3.0 * std::sqrt(nu * horizon.horizon());
    const double est = terminal.gradient_bound(r) + horizon.horizon() * potential.gradient_bound(r);
    return est > 0.0 ? 10.0 * est : 1.0;
}

ControlLattice::ControlLattice(int dim, double bound, int K, const Lagrangian& lagrangian)
    : dim_(dim), bound_(bound), K_(K) {
    if (K < 1 || !(bound > 0.0)) {
        throw ConfigError("control lattice is empty (need K >= 1 and C > 0)");
    }
    const double step = bound / K;
    struct Entry {
        Vec u;
        std::array<int, 2> idx;
        double r2;
    };
    std::vector<Entry> entries;
    const int jmax = dim == 2 ? K : 0;
    for (int j = -jmax; j <= jmax; ++j) {
        for (int i = -K; i <= K; ++i) {
            if (i * i + j * j > K * K) continue;
            const Vec u{i * step, j * step};
            entries.push_back({u, {i, j}, double(i * i + j * j)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.r2 < b.r2; });
    for (const auto& e : entries) {
        points_.push_back(e.u);
        indices_.push_back(e.idx);
        costs_.push_back(lagrangian(e.u));
    }
}

HamiltonianMin hamiltonian_min(const Vec& p, const ProblemSpec& spec) {
    const double C = spec.control_bound;
    if (spec.lagrangian.kind == LagrangianKind::quadratic) {
        const double np = norm(p);
        const Vec u = np > C ? p * (-C / np) : -p;
        return {u, 0.5 * norm2(u) + dot(u, p)};
    }
    const ControlLattice lattice(spec.dim, C, spec.lattice_K, spec.lagrangian);
    HamiltonianMin best{Vec{}, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const double v = lattice.cost(i) + dot(lattice.point(i), p);
        if (v < best.value) best = {lattice.point(i), v};
    }
    return best;
}

}  // namespace pathwise
