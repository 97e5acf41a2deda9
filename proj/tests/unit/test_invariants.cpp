#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pathwise/errors.hpp"
#include "pathwise/invariants.hpp"
#include "support.hpp"

using namespace pathwise;
using testing::Gen;

TEST_CASE("midpoint Stratonovich sums telescope for W dW") {
    const auto path = generate_path(21, TimeGrid(0.0, 1.0, 300), 1);
    std::vector<Vec> w(path.values().begin(), path.values().end());
    for (int k0 : {0, 17}) {
        const int k1 = 250;
        const std::span<const Vec> samples(w.data() + k0, std::size_t(k1 - k0 + 1));
        const double expected = 0.5 * (w[k1][0] * w[k1][0] - w[k0][0] * w[k0][0]);
        CHECK(strat_integral(samples, path, k0, k1) == doctest::Approx(expected).epsilon(1e-12));
    }
    const std::vector<Vec> c(301, Vec{2.0});
    CHECK(strat_integral(c, path, 0, 300) == doctest::Approx(2.0 * path.at(300)[0]));
    CHECK_THROWS_AS(strat_integral(std::span<const Vec>(c.data(), 10), path, 0, 300), ConfigError);
    CHECK_THROWS_AS(strat_integral(c, path, 0, 301), ConfigError);
}

TEST_CASE("rotation generators must be antisymmetric") {
    Mat2 A;
    A(0, 1) = 2.0;
    A(1, 0) = -2.0;
    CHECK(is_antisymmetric(A));
    CHECK_NOTHROW(SymmetryField::rotation(A));
    A(0, 0) = 0.1;
    CHECK_FALSE(is_antisymmetric(A));
    CHECK_THROWS_AS(SymmetryField::rotation(A), ConfigError);
}

TEST_CASE("property: symmetry Jacobians match differences of X") {
    Gen gen(8);
    for (const auto& sym : {SymmetryField::rotation(1.7), SymmetryField::time_translation()}) {
        for (int trial = 0; trial < 30; ++trial) {
            const Vec x = gen.vec(2, 2.0);
            const double s = gen.uniform(0.0, 1.0);
            const Mat2 J = sym.X_jac(s, x);
            const double h = 1e-6;
            for (int c = 0; c < 2; ++c) {
                Vec dx{};
                dx[std::size_t(c)] = h;
                const Vec d = (sym.X(s, x + dx) - sym.X(s, x - dx)) * (0.5 / h);
                CHECK(J(0, c) == doctest::Approx(d[0]).scale(1.0));
                CHECK(J(1, c) == doctest::Approx(d[1]).scale(1.0));
            }
            CHECK(sym.T_dot(s) == doctest::Approx((sym.T(s + h) - sym.T(s - h)) / (2 * h)).scale(1.0));
        }
    }
}

TEST_CASE("time translation conserves -|p|^2/2 for a linear terminal cost") {
    ProblemSpec spec;
    spec.horizon = TimeGrid(0.0, 1.0, 100);
    spec.terminal = CatalogEntry::linear(Vec{0.8, 0.0});
    spec.control_bound = 8.0;
    const SpaceGrid g(-4.0, 4.0, 201);
    const auto path = generate_path(4, spec.horizon, 1);
    const auto drift = extract_drift(solve_by_shift(spec, path, g), spec);
    const auto z = simulate_optimal(spec, path, drift, 0, Vec{0.1});
    const auto trace = conserved_quantity(SymmetryField::time_translation(), drift, z, path, spec);
    REQUIRE(trace.Q.size() == 101);
    for (double q : trace.Q) CHECK(q == doctest::Approx(-0.32).epsilon(1e-9));
    CHECK(trace.max_abs_residual() <= 1e-9);
    std::ostringstream os;
    write_trace_csv(os, trace);
    CHECK(os.str().rfind("k,t,Q,noise_integral,residual\n", 0) == 0);
}

TEST_CASE("rotation in the plane") {
    ProblemSpec spec;
    spec.dim = 2;
    spec.lattice_K = 5;
    spec.horizon = TimeGrid(0.0, 1.0, 40);
    spec.terminal = CatalogEntry::quadratic(1.0);
    spec.control_bound = default_control_bound(spec.potential, spec.terminal, spec.nu, spec.horizon, 4.0 * std::sqrt(2.0));
    const SpaceGrid g(Vec{-4.0, -4.0}, Vec{4.0, 4.0}, 61, 2);
    const auto path = generate_path(3, spec.horizon, 2);
    const auto drift = extract_drift(solve_by_shift(spec, path, g), spec);
    const auto z = simulate_optimal(spec, path, drift, 0, Vec{1.0, 0.5});
    const auto trace = conserved_quantity(SymmetryField::rotation(1.0), drift, z, path, spec);
    CHECK(trace.max_abs_residual() <= 0.05 * (1.0 + trace.max_abs_Q()));

    // A radial potential makes the symmetry equation hold for any drift.
    auto radial = spec;
    radial.potential = CatalogEntry::radial_cosine(1.0);
    radial.terminal = CatalogEntry::radial_cosine(1.0);
    radial.control_bound = 20.0;
    const auto rd = extract_drift(solve_by_shift(radial, path, g), radial);
    const auto rz = simulate_optimal(radial, path, rd, 0, Vec{1.0, 0.5});
    CHECK(symmetry_residual(SymmetryField::rotation(1.0), rd, rz, radial, 0.1) <= 1e-6);
    CHECK(symmetry_residual(SymmetryField::rotation(1.0), drift, z, spec, 0.1) <= 1e-10);
}
