#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pathwise/errors.hpp"
#include "pathwise/problem.hpp"
#include "support.hpp"

using namespace pathwise;
using testing::Gen;

namespace {

std::vector<CatalogEntry> catalog_samples() {
    return {CatalogEntry::zero(),
            CatalogEntry::constant(2.5),
            CatalogEntry::linear(Vec{0.8, -0.3}, 0.1),
            CatalogEntry::cosine(1.3, Vec{1.0, 2.0}, 0.4, -0.2),
            CatalogEntry::quadratic(0.7, 1.0),
            CatalogEntry::radial_cosine(1.1, 0.5)};
}

}  // namespace

TEST_CASE("property: catalog gradients and Laplacians match central differences") {
    Gen gen(99);
    const double h = 1e-4;
    for (const auto& e : catalog_samples()) {
        for (int dim : {1, 2}) {
            for (int trial = 0; trial < 50; ++trial) {
                Vec x = gen.vec(dim, 3.0);
                if (norm(x) < 0.1) x[0] += 0.5;
                const auto v = catalog_eval(e, x, dim);
                double lap = 0.0;
                for (int a = 0; a < dim; ++a) {
                    Vec dx{};
                    dx[std::size_t(a)] = h;
                    const double fp = catalog_value(e, x + dx, dim);
                    const double fm = catalog_value(e, x - dx, dim);
                    CHECK(v.gradient[std::size_t(a)] == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
                    lap += (fp - 2 * v.value + fm) / (h * h);
                }
                CHECK(v.laplacian == doctest::Approx(lap).epsilon(1e-4).scale(1.0));
            }
        }
    }
}

TEST_CASE("catalog identities and flags") {
    const auto sin_plus = CatalogEntry::cosine(1.0, Vec{1.0, 0.0}, -std::numbers::pi / 2, 1.0);
    CHECK(catalog_value(sin_plus, Vec{0.3}, 1) == doctest::Approx(std::sin(0.3) + 1.0));
    CHECK(catalog_value(CatalogEntry::quadratic(1.0).plus(2.0), Vec{1.0}, 1) == doctest::Approx(2.5));
    CHECK(catalog_value(CatalogEntry::zero().plus(1.0), Vec{7.0}, 1) == doctest::Approx(1.0));
    CHECK(CatalogEntry::cosine(1.0, Vec{1.0, 0.0}).bounded());
    CHECK_FALSE(CatalogEntry::quadratic().lipschitz());
    CHECK(CatalogEntry::linear(Vec{1.0, 0.0}).harmonic());
    CHECK(catalog_kind_from_string("radial_cosine") == CatalogKind::radial_cosine);
    CHECK_THROWS_AS(catalog_kind_from_string("gaussian"), ConfigError);
    const auto r0 = catalog_eval(CatalogEntry::radial_cosine(2.0), Vec{}, 2);
    CHECK(r0.value == doctest::Approx(2.0));
    CHECK(r0.laplacian == doctest::Approx(-4.0));
}

TEST_CASE("gradient bounds dominate sampled gradients") {
    Gen gen(3);
    for (const auto& e : catalog_samples()) {
        const double bound = e.gradient_bound(3.0 * std::sqrt(2.0));
        for (int trial = 0; trial < 200; ++trial) {
            const Vec x = gen.vec(2, 3.0);
            CHECK(norm(catalog_eval(e, x, 2).gradient) <= bound + 1e-12);
        }
    }
}

TEST_CASE("control lattice layout") {
    const ControlLattice l1(1, 2.0, 4, Lagrangian{});
    CHECK(l1.size() == 9);
    CHECK(l1.spacing() == doctest::Approx(0.5));
    CHECK(norm(l1.point(0)) == 0.0);
    const ControlLattice l2(2, 1.0, 5, Lagrangian{});
    int expected = 0;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) expected += (i * i + j * j <= 25);
    CHECK(l2.size() == std::size_t(expected));
    for (std::size_t c = 1; c < l2.size(); ++c) {
        CHECK(norm(l2.point(c - 1)) <= norm(l2.point(c)) + 1e-15);
        CHECK(norm(l2.point(c)) <= 1.0 + 1e-12);
        CHECK(l2.cost(c) == doctest::Approx(0.5 * norm2(l2.point(c))));
    }
    CHECK_THROWS_AS(ControlLattice(1, 0.0, 4, Lagrangian{}), ConfigError);
}

TEST_CASE("Hamiltonian minimiser") {
    ProblemSpec spec;
    spec.control_bound = 2.0;
    auto m = hamiltonian_min(Vec{0.5}, spec);
    CHECK(m.u_star[0] == doctest::Approx(-0.5));
    CHECK(m.value == doctest::Approx(-0.125));
    m = hamiltonian_min(Vec{3.0}, spec);
    CHECK(m.u_star[0] == doctest::Approx(-2.0));
    CHECK(m.value == doctest::Approx(2.0 - 6.0));
    spec.lagrangian = lagrangian_from_string("euclidean", 1.0);
    m = hamiltonian_min(Vec{0.5}, spec);
    CHECK(m.value == doctest::Approx(0.0));
    m = hamiltonian_min(Vec{3.0}, spec);
    CHECK(m.u_star[0] == doctest::Approx(-2.0));
    CHECK(m.value == doctest::Approx(2.0 - 6.0));
}

TEST_CASE("problem validation") {
    ProblemSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.nu = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.nu = 0.25;
    spec.control_bound = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.control_bound = 1.0;
    spec.dim = 3;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(lagrangian_from_string("euclidean", 0.0), ConfigError);
    CHECK_THROWS_AS(lagrangian_from_string("huber"), ConfigError);
}

TEST_CASE("default control bound") {
    const TimeGrid tg(0.0, 1.0, 10);
    CHECK(default_control_bound(CatalogEntry::zero(), CatalogEntry::quadratic(), 0.25, tg, 4.0) ==
          doctest::Approx(55.0));
    CHECK(default_control_bound(CatalogEntry::zero(), CatalogEntry::zero(), 0.25, tg, 4.0) == 1.0);
    CHECK(default_control_bound(CatalogEntry::cosine(1.0, Vec{1.0, 0.0}), CatalogEntry::linear(Vec{0.8, 0.0}),
                                0.25, tg, 4.0) == doctest::Approx(18.0));
}

TEST_CASE("non-Lipschitz data produce warnings") {
    auto spec = testing::quadratic_problem(10);
    CHECK(spec.provenance_warnings().size() == 1);
    spec.terminal = CatalogEntry::cosine(1.0, Vec{1.0, 0.0});
    CHECK(spec.provenance_warnings().empty());
}
