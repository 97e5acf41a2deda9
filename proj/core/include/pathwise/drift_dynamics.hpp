/**
 * @file drift_dynamics.hpp
 * @brief Optimal drift u* = -grad U, the optimally controlled state, and the
 *        residuals of the momentum identity and of the drift equation.
 *
 * Along the optimal state the momentum obeys
 *
 *   u*(s_k, Z_k) - u*(t, Z_t) = sum_{j<k} delta grad V(Z_j),   u*(T, Z_T) = -grad S(Z_T).
 *
 * With u~(s, y) = u*(s, y + sqrt(nu) W_s) the drift equation has no noise term:
 *
 *   d/ds u~ + (u~ . grad) u~ - grad V(y + sqrt(nu) W_s) = 0.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pathwise/fields.hpp"
#include "pathwise/oracle.hpp"
#include "pathwise/pathwise_value.hpp"

namespace pathwise {

struct DriftField {
    TimeGrid grid;
    std::vector<VectorField> fields;
    std::uint64_t seed;
    std::size_t clamped_nodes = 0;       ///< nodes (all times) where |u| was cut back to C
    std::size_t clamped_core_nodes = 0;  ///< same, restricted to the core region
    /// u~(s_k, y) = -grad w(s_k, y), available when the value field carries its
    /// shifted-frame solution; avoids re-interpolating u* back along the path.
    std::optional<std::vector<VectorField>> shifted{};

    const VectorField& at(int k) const { return fields[std::size_t(k)]; }
    const SpaceGrid& space() const { return fields.front().grid(); }
};

/// Clamps to the control ball; strict mode throws PreconditionError when a
/// core node needed clamping.
DriftField extract_drift(const ValueField& vf, const ProblemSpec& spec, bool strict = false,
                         double core_fraction = 0.5);

enum class Integrator { euler, heun };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& name);

StatePath simulate_optimal(const ProblemSpec& spec, const BrownianPath& path,
                           const DriftField& drift, int t_index, const Vec& x,
                           Integrator scheme = Integrator::euler);

struct MomentumResidual {
    double path;      ///< max_k |u*(s_k, Z_k) - u*(t, Z_t) - sum_{j<k} delta grad V(Z_j)|
    double terminal;  ///< |u*(T, Z_N) + grad S(Z_N)|
    double total() const { return path + terminal; }
};

MomentumResidual momentum_residual(const DriftField& drift, const StatePath& state,
                                   const ProblemSpec& spec);

/// Max over core nodes and steps k < N of the shifted-frame residual
/// (forward time difference, central space differences). Uses the native
/// shifted-frame drift when present, otherwise shift_sample of u* by sqrt(nu) W_k.
double drift_spde_residual(const DriftField& drift, const BrownianPath& path,
                           const ProblemSpec& spec, double core_fraction = 0.5);

/// Max interior |u*(T, .) + grad S|.
double terminal_drift_gap(const DriftField& drift, const ProblemSpec& spec);

/// `k,t,z_1[,z_2],ustar_1[,ustar_2]`
void write_trajectory_csv(std::ostream& out, const StatePath& state, const DriftField& drift);

}  // namespace pathwise
