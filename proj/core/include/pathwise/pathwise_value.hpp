/**
 * @file pathwise_value.hpp
 * @brief Value process U_t(x) of the pathwise control problem for one fixed
 *        Brownian path, by the shifted-frame method and by backward splitting.
 *
 * Shifted frame: with y = x - sqrt(nu) W_s the noise drops out and
 *
 *   w(s, y) = min { int_s^T L(u) + V(y_r + sqrt(nu) W_r) dr + S(y_T + sqrt(nu) W_T) },
 *   U_s(x)  = w(s, x - sqrt(nu) W_s).
 *
 * Splitting: per backward step a Hamilton-Jacobi update with the static V,
 * followed by the exact transport shift x -> x + sqrt(nu) (W_{k+1} - W_k).
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathwise/fields.hpp"
#include "pathwise/hj_core.hpp"
#include "pathwise/problem.hpp"
#include "pathwise/randomness.hpp"

namespace pathwise {

enum class SolveMethod { shift, splitting };

std::string to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& name);

struct ValueField {
    ValueSequence seq;  ///< fields in original x coordinates
    std::uint64_t seed;
    int level;
    SolveMethod method;
    /// w(s_k, y) on the same grid; present for the shift method only.
    std::optional<ValueSequence> shifted_frame{};

    const TimeGrid& time() const { return seq.grid; }
    const SpaceGrid& space() const { return seq.space(); }
    const ScalarField& at(int k) const { return seq.at(k); }
};

ValueField solve_by_shift(const ProblemSpec& spec, const BrownianPath& path, const SpaceGrid& grid,
                          BoundaryMode mode = BoundaryMode::linear_extrapolate);
ValueField solve_by_splitting(const ProblemSpec& spec, const BrownianPath& path,
                              const SpaceGrid& grid,
                              BoundaryMode mode = BoundaryMode::linear_extrapolate);
ValueField solve_value(SolveMethod method, const ProblemSpec& spec, const BrownianPath& path,
                       const SpaceGrid& grid);

/// | U_t(x) - min over m-step lattice controls of { running cost + I[U_{t+m}](Z_m) } |.
/// The minimum is exact over all lattice sequences (the reachable states form a lattice).
double dpp_residual(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                    int t_index, const Vec& x, int m);

/// Closed-form U_t(x) when V is zero/constant and S is zero/constant/linear/quadratic;
/// empty otherwise. Assumes the unconstrained optimal control is admissible.
std::optional<double> closed_form_value(const ProblemSpec& spec, const BrownianPath& path, int k,
                                        const Vec& x);
/// Optimal drift for the same family (constant along optimal paths).
std::optional<Vec> closed_form_drift(const ProblemSpec& spec, const BrownianPath& path, int k,
                                     const Vec& x);
bool has_closed_form(const ProblemSpec& spec);

/// Max |U - closed form| over core nodes and all time nodes.
double closed_form_error(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                         double core_fraction = 0.5);
/// Max |closed form| over the same set.
double closed_form_magnitude(const ValueField& vf, const ProblemSpec& spec, const BrownianPath& path,
                             double core_fraction = 0.5);

/// Max |a - b| over core nodes and all time nodes (grids must match).
double core_gap(const ValueField& a, const ValueField& b, double core_fraction = 0.5);

enum class Accumulation { log_sum_exp, direct };

struct HopfColeResult {
    ValueSequence eta;
    ValueSequence logeta;
    double residual;            ///< max core-node Ito residual over all steps
    double normalization_defect;  ///< max |1 - sum of kernel weights| (truncation + quadrature)
};

/// Heat-kernel representation of the positive solution of
///   d eta = nu eta'' dt - sqrt(nu) eta' dW,  eta(0, .) = exp(f),
/// by normalized trapezoidal quadrature on `f`'s grid. 1-D only.
HopfColeResult hopf_cole_reference(double nu, const BrownianPath& path, const ScalarField& f,
                                   Accumulation mode = Accumulation::log_sum_exp,
                                   double core_fraction = 0.5);

/// Closed form for f(y) = -y^2/2.
double hopf_cole_gaussian(double nu, double t, double w, double x);

}  // namespace pathwise
