/**
 * @file hj_core.hpp
 * @brief Backward semi-Lagrangian solvers for first-order Hamilton-Jacobi
 *        equations with time-dependent potential, and the explicit viscous
 *        baseline.
 *
 * One backward step maps w_{k+1} to
 *
 *   w_k(y) = min_{|u| <= C} { delta L(u) + I[w_{k+1}](y + delta u) } + delta pot(s_k, y)
 *
 * where I is multilinear interpolation. The minimum is taken over the control
 * lattice; for the quadratic Lagrangian the continuous ball is searched as well
 * (cell-wise exact in 1-D, projected fixed point in 2-D) and the smaller value
 * is kept.
 */

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pathwise/fields.hpp"
#include "pathwise/problem.hpp"
#include "pathwise/randomness.hpp"

namespace pathwise {

/// V(y + shift_k) with one shift vector per time node.
class TimeDependentPotential {
public:
    TimeDependentPotential(CatalogEntry entry, int dim, std::vector<Vec> shifts);
    /// No shift at any node.
    static TimeDependentPotential fixed(const CatalogEntry& entry, int dim, const TimeGrid& grid);

    const CatalogEntry& entry() const { return entry_; }
    std::size_t node_count() const { return shifts_.size(); }
    const Vec& shift(int k) const { return shifts_[std::size_t(k)]; }

    double value(int k, const Vec& y) const;
    Vec gradient(int k, const Vec& y) const;

private:
    CatalogEntry entry_;
    int dim_;
    std::vector<Vec> shifts_;
};

/// Fields at every time node of a grid, index 0 = start.
struct ValueSequence {
    TimeGrid grid;
    std::vector<ScalarField> fields;
    std::string method;

    const ScalarField& at(int k) const { return fields[std::size_t(k)]; }
    const SpaceGrid& space() const { return fields.front().grid(); }
};

/// One backward semi-Lagrangian update on a fixed space and time step.
class HJStepper {
public:
    HJStepper(const ProblemSpec& spec, const SpaceGrid& grid, double delta);

    const ControlLattice& lattice() const { return lattice_; }
    double delta() const { return delta_; }

    /// `running` holds delta * pot(s_k, y_n) per node, or is empty for zero potential.
    ScalarField step(const ScalarField& next, std::span<const double> running) const;

private:
    // Node-independent part of the query y_n + delta u_i: whole-cell offset and weights.
    struct Stencil {
        int di, dj;
        double tx, ty;
    };

    double lattice_value(const ScalarField& next, int i, int j, std::size_t c) const;
    double min_1d_exact(const ScalarField& next, double y) const;
    double min_2d_fixed_point(const ScalarField& next, const Vec& y, Vec u0) const;

    ProblemSpec spec_;
    SpaceGrid grid_;
    double delta_;
    ControlLattice lattice_;
    std::vector<Stencil> stencils_;
};

/// delta * pot(s_k, y_n) at every node of `grid`.
std::vector<double> running_cost(const TimeDependentPotential& pot, int k, const SpaceGrid& grid,
                                 double delta);

ValueSequence solve_hj_backward(const ProblemSpec& spec, const TimeDependentPotential& pot,
                                const ScalarField& terminal);

/// Hopf-Lax stage with the static potential, then (nu/2) delta laplacian.
/// Requires nu delta / h^2 <= 1/2.
ValueSequence solve_viscous_hjb(const ProblemSpec& spec, const ScalarField& terminal);

/// Writes `value_<k>.csv` for every `stride`-th node (plus the last) and `index.csv`.
void write_value_sequence(const std::filesystem::path& dir, const ValueSequence& seq,
                          int stride = 1, const std::string& prefix = "value");

}  // namespace pathwise
