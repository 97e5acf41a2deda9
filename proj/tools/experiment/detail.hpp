// Shared plumbing between the experiment driver and the subcommand bodies.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "experiment.hpp"
#include "pathwise/fields.hpp"
#include "pathwise/pathwise_value.hpp"
#include "pathwise/problem.hpp"

namespace pathwise::experiment::detail {

using json = nlohmann::ordered_json;

struct Setup {
    ProblemSpec spec;
    SpaceGrid grid{-4.0, 4.0, 401};
    BoundaryMode boundary = BoundaryMode::linear_extrapolate;
    double core_fraction = 0.5;
    double box_radius = 4.0;  ///< largest |x| over the grid box
    std::vector<std::uint64_t> seeds;
    std::vector<SolveMethod> methods;
};

class Context {
public:
    Context(const Config& config, std::filesystem::path out, int workers,
            std::map<std::string, double> tolerances)
        : cfg(config), out_(std::move(out)), workers_(workers), tol_(std::move(tolerances)) {}

    const Config& cfg;

    int workers() const { return workers_; }
    double tolerance(const std::string& key) const { return tol_.at(key); }

    /// Call once every key has been read; unknown keys abort before any solve.
    void ready() const { cfg.check_all_used(); }

    void check(const std::string& name, bool passed, double measured, double threshold,
               const std::string& detail = "");
    const std::vector<Criterion>& criteria() const { return criteria_; }

    json& measurements() { return measurements_; }

    /// Writes `content` to out/rel, creating parent directories.
    void write(const std::filesystem::path& rel, const std::string& content) const;
    std::filesystem::path path(const std::filesystem::path& rel) const;

private:
    std::filesystem::path out_;
    int workers_;
    std::map<std::string, double> tol_;
    std::vector<Criterion> criteria_;
    json measurements_ = json::object();
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes
/// only its own result slot; the first failure (by index) is rethrown.
template <class F>
void parallel_for(std::size_t n, int workers, F&& fn) {
    const std::size_t threads = std::min<std::size_t>(n, std::size_t(std::max(workers, 1)));
    std::vector<std::exception_ptr> errors(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

Setup read_setup(const Config& cfg);
CatalogEntry read_catalog(const Config& cfg, const std::string& section, const std::string& key,
                          const CatalogEntry& fallback);
/// Points given as a flat list; in 2-D consecutive values pair up.
std::vector<Vec> read_points(const Config& cfg, const std::string& section, const std::string& key,
                             int dim, const std::vector<double>& fallback);

json problem_json(const ProblemSpec& spec);
json grid_json(const SpaceGrid& grid);
std::string num(double v);
std::string point_label(const Vec& x, int dim);

void run_value(Context& ctx, const Setup& s);
void run_oracle_compare(Context& ctx, Setup s);
void run_dpp(Context& ctx, const Setup& s);
void run_drift(Context& ctx, const Setup& s);
void run_invariants(Context& ctx, const Setup& s);
void run_comparison(Context& ctx, const Setup& s);
void run_convergence(Context& ctx, const Setup& s);
void run_hopf_cole(Context& ctx, const Setup& s);

}  // namespace pathwise::experiment::detail
