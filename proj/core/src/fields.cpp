#include "pathwise/fields.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

std::string to_string(BoundaryMode mode) {
    return mode == BoundaryMode::clamp ? "clamp" : "linear-extrapolate";
}

BoundaryMode boundary_mode_from_string(const std::string& name) {
    if (name == "clamp") return BoundaryMode::clamp;
    if (name == "linear-extrapolate" || name == "linear") return BoundaryMode::linear_extrapolate;
    throw ConfigError("unknown boundary mode '" + name + "'");
}

SpaceGrid::SpaceGrid(double lower, double upper, int M)
    : SpaceGrid(Vec{lower, 0.0}, Vec{upper, 0.0}, M, 1) {}

SpaceGrid::SpaceGrid(Vec lower, Vec upper, int M, int dim)
    : dim_(dim), lower_(lower), upper_(upper), M_(M), h_(0.0) {
    if (dim != 1 && dim != 2) {
        throw ConfigError("space grid dimension must be 1 or 2 (got " + std::to_string(dim) + ")");
    }
    if (M < 3) throw ConfigError("space grid needs M >= 3 nodes per axis");
    if (dim == 1) {
        lower_[1] = 0.0;
        upper_[1] = 0.0;
    }
    for (int a = 0; a < dim; ++a) {
        if (!(lower_[std::size_t(a)] < upper_[std::size_t(a)])) {
            throw ConfigError("space grid requires lower < upper on every axis");
        }
    }
    h_ = (upper_[0] - lower_[0]) / (M - 1);
    if (dim == 2) {
        const double hy = (upper_[1] - lower_[1]) / (M - 1);
        if (std::abs(hy - h_) > 1e-12 * h_) {
            throw ConfigError("2-D grids must be square (equal spacing on both axes)");
        }
    }
}

Vec SpaceGrid::point(std::size_t node) const {
    return point(axis_index(node, 0), dim_ == 2 ? axis_index(node, 1) : 0);
}

bool SpaceGrid::contains(const Vec& x) const {
    for (int a = 0; a < dim_; ++a) {
        const auto au = std::size_t(a);
        if (x[au] < lower_[au] || x[au] > upper_[au]) return false;
    }
    return true;
}

SpaceGrid SpaceGrid::refined() const { return SpaceGrid(lower_, upper_, 2 * M_ - 1, dim_); }

CoreRegion CoreRegion::of(const SpaceGrid& grid, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("core fraction must lie in (0, 1]");
    }
    const double length = grid.upper()[0] - grid.lower()[0];
    const double margin = 0.5 * (1.0 - fraction) * length;
    const double h = grid.spacing();
    const int lo = static_cast<int>(std::ceil(margin / h - 1e-9));
    const int hi = static_cast<int>(std::floor((length - margin) / h + 1e-9));
    return CoreRegion{lo, hi};
}

bool CoreRegion::contains_node(const SpaceGrid& grid, std::size_t node) const {
    for (int a = 0; a < grid.dim(); ++a) {
        const int i = grid.axis_index(node, a);
        if (i < lo || i > hi) return false;
    }
    return true;
}

bool CoreRegion::contains_point(const SpaceGrid& grid, const Vec& x) const {
    const double h = grid.spacing();
    for (int a = 0; a < grid.dim(); ++a) {
        const auto au = std::size_t(a);
        const double s = (x[au] - grid.lower()[au]) / h;
        if (s < lo - 1e-9 || s > hi + 1e-9) return false;
    }
    return true;
}

std::vector<std::size_t> CoreRegion::nodes(const SpaceGrid& grid) const {
    std::vector<std::size_t> out;
    if (grid.dim() == 1) {
        for (int i = lo; i <= hi; ++i) out.push_back(grid.index(i));
    } else {
        for (int j = lo; j <= hi; ++j)
            for (int i = lo; i <= hi; ++i) out.push_back(grid.index(i, j));
    }
    return out;
}

ScalarField::ScalarField(SpaceGrid grid, std::vector<double> values, BoundaryMode mode)
    : grid_(grid), values_(std::move(values)), mode_(mode) {
    if (values_.size() != grid_.node_count()) {
        throw ConfigError("scalar field needs one value per grid node");
    }
}

ScalarField ScalarField::constant(const SpaceGrid& grid, double c, BoundaryMode mode) {
    return ScalarField(grid, std::vector<double>(grid.node_count(), c), mode);
}

ScalarField ScalarField::sample(const SpaceGrid& grid, const std::function<double(const Vec&)>& fn,
                                BoundaryMode mode) {
    std::vector<double> v(grid.node_count());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = fn(grid.point(n));
    return ScalarField(grid, std::move(v), mode);
}

VectorField::VectorField(SpaceGrid grid, std::vector<Vec> values, BoundaryMode mode)
    : grid_(grid), values_(std::move(values)), mode_(mode) {
    if (values_.size() != grid_.node_count()) {
        throw ConfigError("vector field needs one value per grid node");
    }
}

ScalarField VectorField::component(int axis) const {
    std::vector<double> v(values_.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = values_[n][std::size_t(axis)];
    return ScalarField(grid_, std::move(v), mode_);
}

namespace {

struct AxisLocation {
    int i;
    double theta;
    bool outside;
};

AxisLocation locate(double coord, double lower, double h, int M, BoundaryMode mode) {
    double s = (coord - lower) / h;
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-12 * std::max(1.0, std::abs(s))) s = r;
    bool outside = false;
    if (s < 0.0 || s > M - 1) {
        outside = true;
        if (mode == BoundaryMode::clamp) s = std::clamp(s, 0.0, double(M - 1));
    }
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, M - 2);
    return AxisLocation{i, s - i, outside};
}

template <class Values>
auto interp_impl(const SpaceGrid& g, const Values& v, BoundaryMode mode, const Vec& x, bool& outside) {
    const AxisLocation ax = locate(x[0], g.lower()[0], g.spacing(), g.nodes_per_axis(), mode);
    if (g.dim() == 1) {
        outside = ax.outside;
        const auto i = std::size_t(ax.i);
        return v[i] + ax.theta * (v[i + 1] - v[i]);
    }
    const AxisLocation ay = locate(x[1], g.lower()[1], g.spacing(), g.nodes_per_axis(), mode);
    outside = ax.outside || ay.outside;
    const std::size_t n00 = g.index(ax.i, ay.i);
    const std::size_t n10 = n00 + 1;
    const std::size_t n01 = n00 + std::size_t(g.nodes_per_axis());
    const std::size_t n11 = n01 + 1;
    const auto bottom = v[n00] + ax.theta * (v[n10] - v[n00]);
    const auto top = v[n01] + ax.theta * (v[n11] - v[n01]);
    return bottom + ay.theta * (top - bottom);
}

}  // namespace

double interpolate(const ScalarField& f, const Vec& x) {
    bool outside = false;
    return interp_impl(f.grid(), f.values(), f.boundary_mode(), x, outside);
}

InterpolationResult interpolate_flagged(const ScalarField& f, const Vec& x) {
    bool outside = false;
    const double v = interp_impl(f.grid(), f.values(), f.boundary_mode(), x, outside);
    return InterpolationResult{v, outside};
}

Vec interpolate(const VectorField& f, const Vec& x) {
    bool outside = false;
    return interp_impl(f.grid(), f.values(), f.boundary_mode(), x, outside);
}

Vec interpolant_gradient(const ScalarField& f, const Vec& x) {
    const SpaceGrid& g = f.grid();
    const double h = g.spacing();
    const auto v = f.values();
    const AxisLocation ax = locate(x[0], g.lower()[0], h, g.nodes_per_axis(), f.boundary_mode());
    if (g.dim() == 1) {
        if (f.boundary_mode() == BoundaryMode::clamp && ax.outside) return Vec{};
        const auto i = std::size_t(ax.i);
        return Vec{(v[i + 1] - v[i]) / h};
    }
    const AxisLocation ay = locate(x[1], g.lower()[1], h, g.nodes_per_axis(), f.boundary_mode());
    const std::size_t n00 = g.index(ax.i, ay.i);
    const std::size_t n10 = n00 + 1;
    const std::size_t n01 = n00 + std::size_t(g.nodes_per_axis());
    const std::size_t n11 = n01 + 1;
    double gx = ((1.0 - ay.theta) * (v[n10] - v[n00]) + ay.theta * (v[n11] - v[n01])) / h;
    double gy = ((1.0 - ax.theta) * (v[n01] - v[n00]) + ax.theta * (v[n11] - v[n10])) / h;
    if (f.boundary_mode() == BoundaryMode::clamp) {
        if (ax.outside) gx = 0.0;
        if (ay.outside) gy = 0.0;
    }
    return Vec{gx, gy};
}

VectorField gradient(const ScalarField& f) {
    const SpaceGrid& g = f.grid();
    const int M = g.nodes_per_axis();
    const double h = g.spacing();
    const auto v = f.values();
    std::vector<Vec> out(g.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) {
        for (int a = 0; a < g.dim(); ++a) {
            const int i = g.axis_index(n, a);
            const std::size_t stride = a == 0 ? 1 : std::size_t(M);
            double d;
            if (i == 0) {
                d = (v[n + stride] - v[n]) / h;
            } else if (i == M - 1) {
                d = (v[n] - v[n - stride]) / h;
            } else {
                d = (v[n + stride] - v[n - stride]) / (2.0 * h);
            }
            out[n][std::size_t(a)] = d;
        }
    }
    return VectorField(g, std::move(out), f.boundary_mode());
}

ScalarField laplacian(const ScalarField& f) {
    const SpaceGrid& g = f.grid();
    const int M = g.nodes_per_axis();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const auto v = f.values();
    std::vector<double> out(g.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) {
        // Boundary nodes take the stencil of the nearest interior node.
        const int i = std::clamp(g.axis_index(n, 0), 1, M - 2);
        const int j = g.dim() == 2 ? std::clamp(g.axis_index(n, 1), 1, M - 2) : 0;
        const std::size_t c = g.index(i, j);
        double lap = (v[c + 1] - 2.0 * v[c] + v[c - 1]) * inv_h2;
        if (g.dim() == 2) {
            const std::size_t s = std::size_t(M);
            lap += (v[c + s] - 2.0 * v[c] + v[c - s]) * inv_h2;
        }
        out[n] = lap;
    }
    return ScalarField(g, std::move(out), f.boundary_mode());
}

ScalarField shift_sample(const ScalarField& f, const Vec& d) {
    const SpaceGrid& g = f.grid();
    std::vector<double> out(g.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = interpolate(f, g.point(n) + d);
    return ScalarField(g, std::move(out), f.boundary_mode());
}

VectorField shift_sample(const VectorField& f, const Vec& d) {
    const SpaceGrid& g = f.grid();
    std::vector<Vec> out(g.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = interpolate(f, g.point(n) + d);
    return VectorField(g, std::move(out), f.boundary_mode());
}

void write_field_csv(std::ostream& out, const ScalarField& f) {
    const SpaceGrid& g = f.grid();
    out << "# grid dim=" << g.dim() << " M=" << g.nodes_per_axis()
        << " lower=" << format_double(g.lower()[0]);
    if (g.dim() == 2) out << ';' << format_double(g.lower()[1]);
    out << " upper=" << format_double(g.upper()[0]);
    if (g.dim() == 2) out << ';' << format_double(g.upper()[1]);
    out << " h=" << format_double(g.spacing()) << " boundary=" << to_string(f.boundary_mode())
        << '\n';
    out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const Vec p = g.point(n);
        out << format_double(p[0]) << ',';
        if (g.dim() == 2) out << format_double(p[1]) << ',';
        out << format_double(f[n]) << '\n';
    }
}

}  // namespace pathwise
