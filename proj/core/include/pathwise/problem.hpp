/**
 * @file problem.hpp
 * @brief Control problem instances: potential/terminal catalog, running
 *        Lagrangian, the admissible control ball and its lattice, and the
 *        pointwise Hamiltonian  min_{|u|<=C} { L(u) + <u, p> }.
 */

#pragma once

#include <string>
#include <vector>

#include "pathwise/randomness.hpp"
#include "pathwise/vec.hpp"

namespace pathwise {

enum class CatalogKind { zero, constant, linear, cosine, quadratic, radial_cosine };

/// Closed-form scalar function of the state, used for V and S.
///
///   zero            0
///   constant        offset
///   linear          <a, x> + offset
///   cosine          kappa * cos(<k, x> + phase) + offset
///   quadratic       kappa/2 * |x|^2 + offset         (unbounded; oracle use only)
///   radial_cosine   kappa * cos(|x|) + offset
struct CatalogEntry {
    CatalogKind kind = CatalogKind::zero;
    double kappa = 1.0;
    Vec a{};
    Vec k{1.0, 0.0};
    double phase = 0.0;
    double offset = 0.0;

    static CatalogEntry zero() { return {}; }
    static CatalogEntry constant(double c);
    static CatalogEntry linear(Vec a, double offset = 0.0);
    static CatalogEntry cosine(double kappa, Vec k, double phase = 0.0, double offset = 0.0);
    static CatalogEntry quadratic(double kappa = 1.0, double offset = 0.0);
    static CatalogEntry radial_cosine(double kappa = 1.0, double offset = 0.0);

    std::string id() const;
    bool bounded() const;
    bool lipschitz() const;
    bool harmonic() const;
    /// sup |grad| over the ball of the given radius (global bound when finite).
    double gradient_bound(double radius) const;
    /// Second-derivative bound (operator norm of the Hessian), global.
    double hessian_bound() const;

    /// Same function plus a constant.
    CatalogEntry plus(double c) const;
};

CatalogKind catalog_kind_from_string(const std::string& id);
std::string to_string(CatalogKind kind);

struct CatalogValue {
    double value;
    Vec gradient;
    double laplacian;
};

CatalogValue catalog_eval(const CatalogEntry& entry, const Vec& x, int dim);
inline double catalog_value(const CatalogEntry& entry, const Vec& x, int dim) {
    return catalog_eval(entry, x, dim).value;
}

enum class LagrangianKind {
    quadratic,  ///< |u|^2 / 2
    euclidean,  ///< weight * |u|   (Lipschitz, non-smooth at 0)
};

struct Lagrangian {
    LagrangianKind kind = LagrangianKind::quadratic;
    double weight = 1.0;

    double operator()(const Vec& u) const;
    Vec gradient(const Vec& u) const;
    std::string id() const;
};

Lagrangian lagrangian_from_string(const std::string& id, double weight = 1.0);

struct ProblemSpec {
    int dim = 1;
    double nu = 0.25;
    TimeGrid horizon{0.0, 1.0, 100};
    CatalogEntry potential{};
    CatalogEntry terminal{};
    double control_bound = 10.0;
    Lagrangian lagrangian{};
    int lattice_K = 20;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
    /// One message per unbounded catalog entry in use.
    std::vector<std::string> provenance_warnings() const;
};

/// 10 * (sup|grad S| + T sup|grad V|) over the grid box widened by 3 sqrt(nu T).
double default_control_bound(const CatalogEntry& potential, const CatalogEntry& terminal,
                             double nu, const TimeGrid& horizon, double box_radius);

/// Uniform (2K+1)^dim lattice on [-C, C]^dim intersected with the ball |u| <= C,
/// ordered by increasing |u| so that strict-improvement scans tie-break toward
/// the smaller control.
class ControlLattice {
public:
    ControlLattice(int dim, double bound, int K, const Lagrangian& lagrangian);

    int dim() const { return dim_; }
    double bound() const { return bound_; }
    int K() const { return K_; }
    double spacing() const { return bound_ / K_; }
    std::size_t size() const { return points_.size(); }
    const Vec& point(std::size_t i) const { return points_[i]; }
    double cost(std::size_t i) const { return costs_[i]; }
    /// Integer lattice coordinates of point i (u = spacing * idx).
    const std::array<int, 2>& index(std::size_t i) const { return indices_[i]; }

private:
    int dim_;
    double bound_;
    int K_;
    std::vector<Vec> points_;
    std::vector<double> costs_;
    std::vector<std::array<int, 2>> indices_;
};

struct HamiltonianMin {
    Vec u_star;
    double value;
};

/// min over |u| <= C of L(u) + <u, p>; closed form for quadratic L, lattice scan otherwise.
HamiltonianMin hamiltonian_min(const Vec& p, const ProblemSpec& spec);

/// Projection onto the closed ball of radius C.
inline Vec project_to_ball(const Vec& u, double C) {
    const double n = norm(u);
    return n > C ? u * (C / n) : u;
}

}  // namespace pathwise
