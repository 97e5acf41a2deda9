/**
 * @file invariants.hpp
 * @brief Midpoint Stratonovich sums, symmetry generators and the conserved
 *        quantity Q = <X, u*> - T (|u*|^2/2 - V) along optimal trajectories.
 *
 * A generator Y = (T(s), X(s, x)) is a variation symmetry of the action when
 *
 *   <p, DX> - (|p|^2/2 - V) T' + <grad V, X> = 0,   DX = d_s X + (grad X) p + (nu/2) lap X,
 *
 * with p = u*(s, Z_s). The bounded-variation part of Q then equals (nu/2) T lap V.
 */

#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pathwise/drift_dynamics.hpp"
#include "pathwise/oracle.hpp"

namespace pathwise {

enum class SymmetryKind { time_translation, rotation, custom };

std::string to_string(SymmetryKind k);

struct SymmetryField {
    SymmetryKind kind = SymmetryKind::time_translation;
    std::function<double(double)> T;
    std::function<double(double)> T_dot;
    std::function<Vec(double, const Vec&)> X;
    std::function<Vec(double, const Vec&)> X_s;    ///< time derivative of X
    std::function<Mat2(double, const Vec&)> X_jac;  ///< (grad X)_{ij} = d X_i / d x_j
    std::function<Vec(double, const Vec&)> X_lap;  ///< component-wise Laplacian of X

    static SymmetryField time_translation();
    /// X(x) = A x with A = omega [[0, -1], [1, 0]], T = 0.
    static SymmetryField rotation(double omega = 1.0);
    /// X(x) = A x for a user matrix; throws ConfigError unless A^T = -A.
    static SymmetryField rotation(const Mat2& A);
};

bool is_antisymmetric(const Mat2& A, double tol = 0.0);

/// Sum over steps k in [k0, k1) of <(a_k + a_{k+1})/2, W_{k+1} - W_k>.
/// `samples` holds node values a_{k0} .. a_{k1}.
double strat_integral(std::span<const Vec> samples, const BrownianPath& path, int k0, int k1);

struct QuantityTrace {
    TimeGrid grid;
    int t_index;
    std::vector<double> Q;
    std::vector<double> noise;     ///< N_k, partial Stratonovich sums of the noise coefficient
    std::vector<double> residual;  ///< R_k

    double max_abs_residual() const;
    double max_abs_Q() const;
};

/// R_k = Q_k - Q_0 - N_k - sum_{j<k} delta (nu/2) T lap V
///       + sum_{j<k} delta (nu/2) (T lap V + <lap X, u*>)
/// The last sum converts the Ito-form bounded-variation rate into the
/// Stratonovich rate that pairs with the midpoint noise sum; it vanishes for
/// harmonic V and affine X.
QuantityTrace conserved_quantity(const SymmetryField& sym, const DriftField& drift,
                                 const StatePath& state, const BrownianPath& path,
                                 const ProblemSpec& spec);

/// Max over path nodes with |Z| > guard of the symmetry-condition residual.
double symmetry_residual(const SymmetryField& sym, const DriftField& drift, const StatePath& state,
                         const ProblemSpec& spec, double guard = 0.0);

/// `k,t,Q,noise_integral,residual`
void write_trace_csv(std::ostream& out, const QuantityTrace& trace);

}  // namespace pathwise
