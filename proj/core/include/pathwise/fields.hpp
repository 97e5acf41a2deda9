/**
 * @file fields.hpp
 * @brief Uniform spatial grids, scalar/vector node fields and the finite
 *        difference, interpolation and shift operators the solvers share.
 *
 * Nodes are stored x-fastest: index = i + M * j. Two-dimensional grids are
 * square (same node count and spacing on both axes).
 */

#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pathwise/vec.hpp"

namespace pathwise {

enum class BoundaryMode {
    clamp,               ///< queries outside the box use the nearest boundary point
    linear_extrapolate,  ///< the boundary cell's multilinear formula is continued outward
};

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& name);

class SpaceGrid {
public:
    /// 1-D grid on [lower, upper].
    SpaceGrid(double lower, double upper, int M);
    /// 2-D square grid; both axes must have the same extent.
    SpaceGrid(Vec lower, Vec upper, int M, int dim);

    int dim() const { return dim_; }
    int nodes_per_axis() const { return M_; }
    std::size_t node_count() const { return dim_ == 1 ? std::size_t(M_) : std::size_t(M_) * M_; }
    double spacing() const { return h_; }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

    std::size_t index(int i, int j = 0) const { return std::size_t(i) + std::size_t(M_) * j; }
    int axis_index(std::size_t node, int axis) const {
        return axis == 0 ? int(node % std::size_t(M_)) : int(node / std::size_t(M_));
    }
    Vec point(std::size_t node) const;
    Vec point(int i, int j) const { return Vec{lower_[0] + i * h_, dim_ == 2 ? lower_[1] + j * h_ : 0.0}; }

    bool contains(const Vec& x) const;

    /// Same box, spacing halved (2M - 1 nodes per axis).
    SpaceGrid refined() const;

    friend bool operator==(const SpaceGrid&, const SpaceGrid&) = default;

private:
    int dim_;
    Vec lower_;
    Vec upper_;
    int M_;
    double h_;
};

/// Central sub-box holding `fraction` of each axis, used for all acceptance norms.
struct CoreRegion {
    int lo;  ///< first node index per axis inside the core
    int hi;  ///< last node index per axis inside the core

    static CoreRegion of(const SpaceGrid& grid, double fraction = 0.5);
    bool contains_node(const SpaceGrid& grid, std::size_t node) const;
    bool contains_point(const SpaceGrid& grid, const Vec& x) const;
    std::vector<std::size_t> nodes(const SpaceGrid& grid) const;
};

class ScalarField {
public:
    ScalarField(SpaceGrid grid, std::vector<double> values,
                BoundaryMode mode = BoundaryMode::linear_extrapolate);

    static ScalarField constant(const SpaceGrid& grid, double c,
                                BoundaryMode mode = BoundaryMode::linear_extrapolate);
    static ScalarField sample(const SpaceGrid& grid, const std::function<double(const Vec&)>& fn,
                              BoundaryMode mode = BoundaryMode::linear_extrapolate);

    const SpaceGrid& grid() const { return grid_; }
    BoundaryMode boundary_mode() const { return mode_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t node) const { return values_[node]; }
    double& operator[](std::size_t node) { return values_[node]; }

private:
    SpaceGrid grid_;
    std::vector<double> values_;
    BoundaryMode mode_;
};

class VectorField {
public:
    VectorField(SpaceGrid grid, std::vector<Vec> values,
                BoundaryMode mode = BoundaryMode::linear_extrapolate);

    const SpaceGrid& grid() const { return grid_; }
    BoundaryMode boundary_mode() const { return mode_; }
    std::span<const Vec> values() const { return values_; }
    std::span<Vec> values() { return values_; }
    const Vec& operator[](std::size_t node) const { return values_[node]; }
    Vec& operator[](std::size_t node) { return values_[node]; }

    ScalarField component(int axis) const;

private:
    SpaceGrid grid_;
    std::vector<Vec> values_;
    BoundaryMode mode_;
};

struct InterpolationResult {
    double value;
    bool outside;  ///< query left the grid box (clamped or extrapolated)
};

/// Multilinear interpolation; exact at nodes and for affine data.
double interpolate(const ScalarField& f, const Vec& x);
InterpolationResult interpolate_flagged(const ScalarField& f, const Vec& x);
Vec interpolate(const VectorField& f, const Vec& x);

/// Gradient of the multilinear interpolant at x (cell-wise constant in 1-D).
Vec interpolant_gradient(const ScalarField& f, const Vec& x);

/// Central differences inside, one-sided first order on boundary nodes.
VectorField gradient(const ScalarField& f);
/// 3-point / 5-point stencil inside; boundary nodes copy the nearest interior node.
ScalarField laplacian(const ScalarField& f);

/// out(x) = interpolate(f, x + d) at every node.
ScalarField shift_sample(const ScalarField& f, const Vec& d);
VectorField shift_sample(const VectorField& f, const Vec& d);

/// `# grid ...` metadata line, then `x[,y],value` rows.
void write_field_csv(std::ostream& out, const ScalarField& f);

}  // namespace pathwise
