// Test helpers: a tiny deterministic generator for property tests and a few
// standard problem instances.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "pathwise/problem.hpp"

namespace testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * double(next() >> 11) * 0x1.0p-53; }
    int integer(int lo, int hi) { return lo + int(next() % std::uint64_t(hi - lo + 1)); }
    pathwise::Vec vec(int dim, double r) {
        return {uniform(-r, r), dim == 2 ? uniform(-r, r) : 0.0};
    }

private:
    std::uint64_t state_;
};

inline pathwise::ProblemSpec quadratic_problem(int N = 400, double box_radius = 4.0) {
    pathwise::ProblemSpec spec;
    spec.horizon = pathwise::TimeGrid(0.0, 1.0, N);
    spec.terminal = pathwise::CatalogEntry::quadratic(1.0);
    spec.control_bound =
        pathwise::default_control_bound(spec.potential, spec.terminal, spec.nu, spec.horizon, box_radius);
    return spec;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pathwise-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing
