/**
 * @file oracle.hpp
 * @brief Brute-force evaluation of the discrete control problem: state
 *        simulation, cost evaluation, lattice enumeration / lattice DP, and
 *        projected gradient descent with adjoint gradients.
 *
 * Discrete problem from node t_index with Z_{t_index} = x:
 *
 *   Z_{k+1} = Z_k + delta u_k + sqrt(nu) (W_{k+1} - W_k)
 *   J       = sum_k delta (L(u_k) + V(Z_k)) + S(Z_N)
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathwise/problem.hpp"
#include "pathwise/randomness.hpp"

namespace pathwise {

struct ControlPath {
    TimeGrid grid;
    int t_index;
    std::vector<Vec> u;  ///< u_k for k = t_index .. N-1 (u[0] is the first step)
    double bound;

    static ControlPath constant(const TimeGrid& grid, int t_index, const Vec& u, double bound);
    /// Throws PreconditionError if any |u_k| exceeds the bound.
    void validate() const;
};

struct StatePath {
    TimeGrid grid;
    int t_index;
    std::vector<Vec> z;  ///< Z_k for k = t_index .. N
    bool truncated = false;  ///< set by simulations that left the space grid

    const Vec& at_node(int k) const { return z[std::size_t(k - t_index)]; }
};

StatePath simulate_state(const ProblemSpec& spec, const BrownianPath& path,
                         const ControlPath& control, int t_index, const Vec& x);

double evaluate_cost(const ProblemSpec& spec, const StatePath& state, const ControlPath& control);

enum class OracleMode { automatic, enumeration, lattice_dp };

std::string to_string(OracleMode m);
OracleMode oracle_mode_from_string(const std::string& name);

struct OracleOptions {
    int K_ctrl = 40;
    double control_bound = 0.0;  ///< 0 means spec.control_bound
    OracleMode mode = OracleMode::automatic;
    double budget = 1e8;         ///< largest enumerated sequence count
};

struct OracleResult {
    double value;
    OracleMode mode;
    int K_ctrl;
    double control_bound;
    double sequences;  ///< count of lattice sequences represented
    ControlPath best;
};

/// Minimum of the discrete cost over piecewise-constant lattice controls
/// ((2K+1)^dim grid on [-C,C]^dim intersected with the ball).
OracleResult brute_force_value(const ProblemSpec& spec, const BrownianPath& path, int t_index,
                               const Vec& x, const OracleOptions& options = {});

struct DescentResult {
    ControlPath control;
    double cost;
    std::vector<double> history;  ///< cost after every accepted iteration, starting with init
    int iterations;
};

/// dJ/du_k = delta (grad L(u_k) + lambda_{k+1}), lambda_N = grad S(Z_N),
/// lambda_j = lambda_{j+1} + delta grad V(Z_j).
std::vector<Vec> cost_gradient(const ProblemSpec& spec, const StatePath& state,
                               const ControlPath& control);

DescentResult descent_refine(const ProblemSpec& spec, const BrownianPath& path, int t_index,
                             const Vec& x, const ControlPath& init, int max_iterations = 500,
                             double step_tolerance = 1e-8);

}  // namespace pathwise
