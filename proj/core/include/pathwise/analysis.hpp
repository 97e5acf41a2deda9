/**
 * @file analysis.hpp
 * @brief Monotonicity (comparison) checks, continuity moduli of value fields
 *        and refinement studies on one nested Brownian path.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pathwise/pathwise_value.hpp"

namespace pathwise {

struct ComparisonReport {
    double positive_part;  ///< sup over nodes and times of (U1 - U2)_+
    double max_shift_gap;  ///< max |U2 - U1 - c| when S2 = S1 + c, else NaN
    int worst_k;
    std::size_t worst_node;
    bool passed;
};

/// Requires S1 <= S2 at every grid node (PreconditionError names the worst node).
ComparisonReport comparison_check(const ProblemSpec& spec, const BrownianPath& path,
                                  const SpaceGrid& grid, const CatalogEntry& S1,
                                  const CatalogEntry& S2, SolveMethod method = SolveMethod::shift,
                                  double tolerance = 1e-10);

struct ContinuityModuli {
    double lip_x;
    double holder_t;
    bool degenerate;  ///< U constant in time or space; moduli reported as 0
};

/// lip_x: max |dU|/h over adjacent core nodes and all times.
/// holder_t: slope of mean log|U_t(x) - U_t'(x)| against log|t - t'| over
/// dyadic lags in [delta, horizon/4], averaged over `points` core nodes.
ContinuityModuli continuity_moduli(const ValueField& vf, int points = 20,
                                   double core_fraction = 0.5);

/// ||grad S||_inf + T ||grad V||_inf for bounded Lipschitz data.
double lipschitz_bound(const ProblemSpec& spec, double radius);

enum class ReferenceKind { closed_form, finest_level };

std::string to_string(ReferenceKind r);
ReferenceKind reference_kind_from_string(const std::string& name);

struct ConvergenceLevel {
    int level;
    double delta;
    double h;
    double error;
};

struct ConvergenceReport {
    SolveMethod method;
    ReferenceKind reference;
    std::vector<ConvergenceLevel> levels;
    double slope;          ///< least-squares slope of log error vs log delta
    bool slope_applicable; ///< false when errors vanish to rounding

    bool strictly_decreasing() const;
};

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solves on `levels` nested levels (delta and h halved together, path refined
/// by bridge midpoints). With finest_level reference one extra level is solved
/// and used as the reference at shared nodes.
ConvergenceReport convergence_study(const ProblemSpec& spec, const SpaceGrid& grid,
                                    const BrownianPath& base_path, int levels,
                                    ReferenceKind reference, SolveMethod method,
                                    double core_fraction = 0.5);

/// Core gap between the two methods on each of `levels` nested levels.
std::vector<double> cross_method_gaps(const ProblemSpec& spec, const SpaceGrid& grid,
                                      const BrownianPath& base_path, int levels,
                                      double core_fraction = 0.5);

/// Spec with its horizon refined `times` times.
ProblemSpec refined_spec(const ProblemSpec& spec, int times);
SpaceGrid refined_grid(const SpaceGrid& grid, int times);

/// `level,delta,h,error`
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace pathwise
