#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pathwise/errors.hpp"
#include "pathwise/hj_core.hpp"
#include "support.hpp"

using namespace pathwise;
using testing::Gen;

namespace {

ProblemSpec quad_spec(int dim, double C, int N = 100) {
    ProblemSpec spec;
    spec.dim = dim;
    spec.horizon = TimeGrid(0.0, 1.0, N);
    spec.terminal = CatalogEntry::quadratic(1.0);
    spec.control_bound = C;
    spec.lattice_K = dim == 1 ? 20 : 5;
    return spec;
}

}  // namespace

TEST_CASE("one step on a linear field is exact") {
    const auto spec = quad_spec(1, 10.0);
    const SpaceGrid g(-4.0, 4.0, 81);
    const double delta = 0.05;
    const HJStepper stepper(spec, g, delta);
    const double p = 1.3;
    const auto next = ScalarField::sample(g, [&](const Vec& x) { return p * x[0]; });
    const std::vector<double> zero(g.node_count(), 0.0);
    const auto H = stepper.step(next, zero);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        CHECK(H[n] == doctest::Approx(p * g.point(n)[0] - 0.5 * delta * p * p).epsilon(1e-12));
    }
}

TEST_CASE("one step on a quadratic field matches the Hopf-Lax minimum") {
    // min_u delta |u|^2/2 + k |y + delta u|^2 / 2 = k |y|^2 / (2 (1 + k delta)).
    const double k = 1.0, delta = 0.01;
    for (int dim : {1, 2}) {
        const auto spec = quad_spec(dim, 55.0);
        const SpaceGrid g = dim == 1 ? SpaceGrid(-4.0, 4.0, 401) : SpaceGrid(Vec{-4.0, -4.0}, Vec{4.0, 4.0}, 81, 2);
        const HJStepper stepper(spec, g, delta);
        const auto next = ScalarField::sample(g, [&](const Vec& x) { return 0.5 * k * norm2(x); });
        const auto H = stepper.step(next, std::vector<double>(g.node_count(), 0.0));
        const double h = g.spacing();
        for (auto n : CoreRegion::of(g).nodes(g)) {
            const double exact = k * norm2(g.point(n)) / (2.0 * (1.0 + k * delta));
            CHECK(std::abs(H[n] - exact) <= k * h * h * dim);
        }
    }
}

TEST_CASE("property: the step is monotone and commutes with constants") {
    // Monotone under clamp; linear extrapolation can reorder values beyond the grid.
    Gen gen(2024);
    const auto spec = quad_spec(1, 8.0);
    const SpaceGrid g(-3.0, 3.0, 61);
    const HJStepper stepper(spec, g, 0.02);
    std::vector<double> running(g.node_count());
    for (auto& r : running) r = gen.uniform(-0.01, 0.01);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(g.node_count()), b(g.node_count()), c(g.node_count());
        const double shift = gen.uniform(-2.0, 2.0);
        for (std::size_t n = 0; n < a.size(); ++n) {
            a[n] = std::sin(gen.uniform(0.0, 6.0)) + 0.2 * g.point(n)[0] * g.point(n)[0];
            b[n] = a[n] + gen.uniform(0.0, 0.5);
            c[n] = a[n] + shift;
        }
        const auto Ha = stepper.step(ScalarField(g, a, BoundaryMode::clamp), running);
        const auto Hb = stepper.step(ScalarField(g, b, BoundaryMode::clamp), running);
        const auto Hc = stepper.step(ScalarField(g, c, BoundaryMode::clamp), running);
        for (std::size_t n = 0; n < a.size(); ++n) {
            CHECK(Ha[n] <= Hb[n] + 1e-12);
            CHECK(Hc[n] == doctest::Approx(Ha[n] + shift).epsilon(1e-12));
        }
    }
}

TEST_CASE("deterministic backward solve reproduces the quadratic value") {
    const auto spec = quad_spec(1, 55.0, 200);
    const SpaceGrid g(-4.0, 4.0, 401);
    const auto pot = TimeDependentPotential::fixed(spec.potential, 1, spec.horizon);
    const auto terminal = ScalarField::sample(g, [](const Vec& x) { return 0.5 * norm2(x); });
    const auto seq = solve_hj_backward(spec, pot, terminal);
    REQUIRE(seq.fields.size() == 201);
    for (int k : {0, 100, 200}) {
        const double tau = 1.0 - spec.horizon.node(k);
        for (auto n : CoreRegion::of(g).nodes(g)) {
            const double x = g.point(n)[0];
            // Interpolation error accumulates as O(h^2 / delta) over the horizon.
            CHECK(std::abs(seq.at(k)[n] - x * x / (2.0 * (1.0 + tau))) < 1e-2);
        }
    }
}

TEST_CASE("viscous HJB matches the stochastic LQ value") {
    // U = x^2 / (2 (1 + tau)) + (nu / 2) log(1 + tau) for S = x^2/2, V = 0.
    auto spec = quad_spec(1, 55.0, 400);
    const SpaceGrid g(-4.0, 4.0, 201);
    const auto terminal = ScalarField::sample(g, [](const Vec& x) { return 0.5 * norm2(x); });
    const auto seq = solve_viscous_hjb(spec, terminal);
    for (auto n : CoreRegion::of(g).nodes(g)) {
        const double x = g.point(n)[0];
        const double exact = x * x / 4.0 + 0.5 * spec.nu * std::log(2.0);
        CHECK(std::abs(seq.at(0)[n] - exact) < 2e-2);
    }
    spec.horizon = TimeGrid(0.0, 1.0, 10);
    CHECK_THROWS_WITH_AS(solve_viscous_hjb(spec, terminal), doctest::Contains("nu*delta/h^2"), ConfigError);
}

TEST_CASE("running cost scales the shifted potential") {
    const SpaceGrid g(-1.0, 1.0, 5);
    const TimeDependentPotential pot(CatalogEntry::linear(Vec{2.0, 0.0}), 1, {Vec{0.5}, Vec{-0.5}});
    const auto r = running_cost(pot, 1, g, 0.1);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        CHECK(r[n] == doctest::Approx(0.1 * 2.0 * (g.point(n)[0] - 0.5)));
    }
}

TEST_CASE("value sequences are written with an index") {
    const auto spec = quad_spec(1, 10.0, 8);
    const SpaceGrid g(-1.0, 1.0, 11);
    const auto pot = TimeDependentPotential::fixed(spec.potential, 1, spec.horizon);
    const auto seq = solve_hj_backward(spec, pot, ScalarField::constant(g, 1.0));
    const auto dir = testing::scratch_dir("valueseq");
    write_value_sequence(dir, seq, 4);
    CHECK(std::filesystem::exists(dir / "value_0.csv"));
    CHECK(std::filesystem::exists(dir / "value_4.csv"));
    CHECK(std::filesystem::exists(dir / "value_8.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "value_2.csv"));
    std::ifstream idx(dir / "value_index.csv");
    std::string header;
    std::getline(idx, header);
    CHECK(header == "k,t,file");
}

TEST_CASE("stepper rejects mismatched grids") {
    const auto spec = quad_spec(1, 10.0);
    const HJStepper stepper(spec, SpaceGrid(-1.0, 1.0, 11), 0.1);
    CHECK_THROWS_AS(stepper.step(ScalarField::constant(SpaceGrid(-1.0, 1.0, 21), 0.0), std::vector<double>(21)),
                    ConfigError);
    CHECK_THROWS_AS(HJStepper(spec, SpaceGrid(-1.0, 1.0, 11), 0.0), ConfigError);
}
