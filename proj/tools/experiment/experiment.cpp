#include "experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detail.hpp"
#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

#ifndef PATHWISE_VERSION
#define PATHWISE_VERSION "unknown"
#endif

namespace pathwise::experiment {

namespace detail {

void Context::check(const std::string& name, bool passed, double measured, double threshold,
                    const std::string& detail) {
    criteria_.push_back({name, passed, measured, threshold, detail});
}

std::filesystem::path Context::path(const std::filesystem::path& rel) const { return out_ / rel; }

void Context::write(const std::filesystem::path& rel, const std::string& content) const {
    const auto p = out_ / rel;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
}

std::string num(double v) { return format_double(v); }

// Shortest round-trip form, so "0.7" stays "0.7" in labels.
std::string point_label(const Vec& x, int dim) {
    auto shortest = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    return dim == 1 ? shortest(x[0]) : shortest(x[0]) + "," + shortest(x[1]);
}

CatalogEntry read_catalog(const Config& cfg, const std::string& section, const std::string& key,
                          const CatalogEntry& fallback) {
    if (!cfg.has(section, key)) return fallback;
    const std::string id = cfg.get_string(section, key);
    CatalogKind kind;
    try {
        kind = catalog_kind_from_string(id);
    } catch (const ConfigError& e) {
        cfg.fail(section, key, e.what());
    }
    auto vec2 = [&](const std::string& name, Vec dflt) {
        const auto v = cfg.get_doubles(section, key + "." + name, std::vector<double>{dflt[0], dflt[1]});
        if (v.empty() || v.size() > 2) cfg.fail(section, key + "." + name, "expected one or two numbers");
        return Vec{v[0], v.size() > 1 ? v[1] : 0.0};
    };
    const double offset = cfg.get_double(section, key + ".offset", 0.0);
    switch (kind) {
        case CatalogKind::zero: return CatalogEntry::zero();
        case CatalogKind::constant: return CatalogEntry::constant(cfg.get_double(section, key + ".c", offset));
        case CatalogKind::linear: return CatalogEntry::linear(vec2("a", Vec{1.0, 0.0}), offset);
        case CatalogKind::cosine:
            return CatalogEntry::cosine(cfg.get_double(section, key + ".kappa", 1.0), vec2("k", Vec{1.0, 0.0}),
                                        cfg.get_double(section, key + ".phase", 0.0), offset);
        case CatalogKind::quadratic:
            return CatalogEntry::quadratic(cfg.get_double(section, key + ".kappa", 1.0), offset);
        case CatalogKind::radial_cosine:
            return CatalogEntry::radial_cosine(cfg.get_double(section, key + ".kappa", 1.0), offset);
    }
    cfg.fail(section, key, "unhandled catalog identifier");
}

std::vector<Vec> read_points(const Config& cfg, const std::string& section, const std::string& key,
                             int dim, const std::vector<double>& fallback) {
    const auto v = cfg.get_doubles(section, key, fallback);
    if (v.empty() || v.size() % std::size_t(dim) != 0) {
        cfg.fail(section, key, "expected a multiple of " + std::to_string(dim) + " coordinates");
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < v.size(); i += std::size_t(dim)) {
        out.push_back(dim == 1 ? Vec{v[i], 0.0} : Vec{v[i], v[i + 1]});
    }
    return out;
}

Setup read_setup(const Config& cfg) {
    Setup s;
    ProblemSpec& p = s.spec;
    p.dim = cfg.get_int("problem", "dim", 1);
    if (p.dim != 1 && p.dim != 2) cfg.fail("problem", "dim", "dimension must be 1 or 2");
    p.nu = cfg.get_double("problem", "nu", 0.25);
    const double t0 = cfg.get_double("problem", "t0", 0.0);
    const double T = cfg.get_double("problem", "T", 1.0);
    const int N = cfg.get_int("problem", "N", 400);
    if (N < 1) cfg.fail("problem", "N", "need at least one time step");
    if (!(T > t0)) cfg.fail("problem", "T", "horizon end must exceed t0");
    p.horizon = TimeGrid(t0, T, N);
    p.potential = read_catalog(cfg, "problem", "potential", CatalogEntry::zero());
    p.terminal = read_catalog(cfg, "problem", "terminal", CatalogEntry::quadratic(1.0));
    try {
        p.lagrangian = lagrangian_from_string(cfg.get_string("problem", "lagrangian", "quadratic"),
                                              cfg.get_double("problem", "lagrangian.weight", 1.0));
    } catch (const ConfigError& e) {
        cfg.fail("problem", "lagrangian", e.what());
    }
    p.lattice_K = cfg.get_int("problem", "lattice_K", 20);

    const double lo = cfg.get_double("grid", "lower", -4.0);
    const double hi = cfg.get_double("grid", "upper", 4.0);
    const int M = cfg.get_int("grid", "M", 401);
    if (!(hi > lo)) cfg.fail("grid", "upper", "upper bound must exceed lower bound");
    if (M < 3) cfg.fail("grid", "M", "need at least 3 nodes per axis");
    s.grid = p.dim == 1 ? SpaceGrid(lo, hi, M) : SpaceGrid(Vec{lo, lo}, Vec{hi, hi}, M, 2);
    try {
        s.boundary = boundary_mode_from_string(cfg.get_string("grid", "boundary", "linear-extrapolate"));
    } catch (const ConfigError& e) {
        cfg.fail("grid", "boundary", e.what());
    }
    s.core_fraction = cfg.get_double("grid", "core_fraction", 0.5);
    if (!(s.core_fraction > 0.0 && s.core_fraction <= 1.0)) {
        cfg.fail("grid", "core_fraction", "core fraction must lie in (0, 1]");
    }
    s.box_radius = std::max(std::abs(lo), std::abs(hi)) * std::sqrt(double(p.dim));

    const std::string cb = cfg.get_string("problem", "control_bound", "auto");
    if (cb == "auto") {
        p.control_bound = default_control_bound(p.potential, p.terminal, p.nu, p.horizon, s.box_radius);
    } else {
        p.control_bound = cfg.get_double("problem", "control_bound");
    }

    s.seeds = cfg.get_seeds("run", "seeds", std::vector<std::uint64_t>{1});
    if (s.seeds.empty()) cfg.fail("run", "seeds", "seed list is empty");
    for (const auto& m : cfg.get_strings("run", "methods", std::vector<std::string>{"shift"})) {
        try {
            s.methods.push_back(solve_method_from_string(m));
        } catch (const ConfigError& e) {
            cfg.fail("run", "methods", e.what());
        }
    }
    // Attribute each validation failure to the key that set it.
    if (!(p.nu > 0.0)) cfg.fail("problem", "nu", "noise level nu must be positive");
    if (!(p.control_bound > 0.0)) cfg.fail("problem", "control_bound", "control bound C must be positive");
    if (p.lattice_K < 1) cfg.fail("problem", "lattice_K", "control lattice needs K >= 1");
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ParseError(cfg.source(), 0, "problem", e.what());
    }
    return s;
}

json problem_json(const ProblemSpec& spec) {
    json j;
    j["dim"] = spec.dim;
    j["nu"] = spec.nu;
    j["t0"] = spec.horizon.t0();
    j["T"] = spec.horizon.T();
    j["N"] = spec.horizon.steps();
    j["potential"] = spec.potential.id();
    j["terminal"] = spec.terminal.id();
    j["lagrangian"] = spec.lagrangian.id();
    j["control_bound"] = spec.control_bound;
    j["lattice_K"] = spec.lattice_K;
    return j;
}

json grid_json(const SpaceGrid& grid) {
    json j;
    j["dim"] = grid.dim();
    j["lower"] = grid.lower()[0];
    j["upper"] = grid.upper()[0];
    j["M"] = grid.nodes_per_axis();
    j["h"] = grid.spacing();
    return j;
}

}  // namespace detail

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"value",       "oracle-compare", "dpp",
                                                "drift",       "invariants",     "comparison",
                                                "convergence", "hopf-cole"};
    return names;
}

const std::map<std::string, double>& default_tolerances(const std::string& subcommand) {
    static const std::map<std::string, std::map<std::string, double>> table{
        {"value",
         {{"closed_form_rel", 0.02},
          {"closed_form_abs", 0.0},
          {"lipschitz_slack", 0.05},
          {"holder_min", 0.35},
          {"holder_max", 0.65}}},
        {"oracle-compare", {{"oracle_gap", 0.05}, {"oracle_modes", 1e-9}}},
        {"dpp", {{"dpp_residual", 0.01}, {"dpp_ratio", 0.6}, {"noise_floor", 1e-8}}},
        {"drift",
         {{"momentum", 0.05},
          {"momentum_ratio", 0.6},
          {"terminal_factor", 2.0},
          {"spde", 0.05},
          {"spde_order", 0.7},
          {"closed_form_drift", 1e-3},
          {"noise_floor", 1e-8}}},
        {"invariants", {{"conserved_rel", 0.02}, {"radial_symmetry", 1e-6}, {"radial_guard", 0.1}}},
        {"comparison", {{"positive_part", 1e-10}, {"shift_gap", 1e-10}}},
        {"convergence", {{"slope", 0.8}}},
        {"hopf-cole", {{"zero_residual", 1e-10}, {"gaussian", 1e-6}, {"ito_residual", 0.01}}},
    };
    const auto it = table.find(subcommand);
    if (it == table.end()) throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
    return it->second;
}

std::filesystem::path default_out_dir() {
    const char* env = std::getenv(kOutEnvVar);
    if (env && *env) return env;
    return "pathwise-out";
}

namespace {

detail::json criteria_json(const std::vector<Criterion>& criteria) {
    detail::json arr = detail::json::array();
    for (const auto& c : criteria) {
        detail::json j;
        j["name"] = c.name;
        j["passed"] = c.passed;
        j["measured"] = c.measured;
        j["threshold"] = c.threshold;
        if (!c.detail.empty()) j["detail"] = c.detail;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace

RunResult run_experiment(const std::string& subcommand, const Config& config,
                         const RunOptions& options) {
    using namespace detail;
    RunResult result;
    try {
        std::map<std::string, double> tol;
        for (const auto& [key, dflt] : default_tolerances(subcommand)) {
            const double v = config.get_double("tolerances", key, dflt);
            // The closed-form pair may have one zero member; everything else is positive.
            const bool pair = key == "closed_form_rel" || key == "closed_form_abs";
            const bool ok = pair ? v >= 0.0 : v > 0.0;
            if (!ok || !std::isfinite(v)) config.fail("tolerances", key, "tolerance must be positive");
            tol[key] = v;
        }
        if (tol.count("closed_form_rel") && tol["closed_form_rel"] == 0.0 && tol["closed_form_abs"] == 0.0) {
            config.fail("tolerances", "closed_form_rel", "closed-form tolerance is zero");
        }
        Setup setup = read_setup(config);
        const int config_workers = config.get_int("run", "workers", 1);
        if (config_workers < 1) config.fail("run", "workers", "need at least one worker");
        const int workers = options.workers > 0 ? options.workers : config_workers;

        Context ctx(config, options.out_dir, workers, tol);
        if (subcommand == "value") run_value(ctx, setup);
        else if (subcommand == "oracle-compare") run_oracle_compare(ctx, setup);
        else if (subcommand == "dpp") run_dpp(ctx, setup);
        else if (subcommand == "drift") run_drift(ctx, setup);
        else if (subcommand == "invariants") run_invariants(ctx, setup);
        else if (subcommand == "comparison") run_comparison(ctx, setup);
        else if (subcommand == "convergence") run_convergence(ctx, setup);
        else run_hopf_cole(ctx, setup);

        result.criteria = ctx.criteria();
        bool all = true;
        for (const auto& c : result.criteria) all = all && c.passed;
        result.status = all ? kStatusPassed : kStatusCriterionFailed;

        json summary;
        summary["tool"] = "pathwise";
        summary["version"] = PATHWISE_VERSION;
        summary["subcommand"] = subcommand;
        summary["config"] = {{"file", std::filesystem::path(config.source()).filename().string()},
                             {"fnv1a64", config.hash()}};
        summary["seeds"] = setup.seeds;
        if (subcommand != "hopf-cole") {
            summary["problem"] = problem_json(setup.spec);
            summary["grid"] = grid_json(setup.grid);
            summary["core_fraction"] = setup.core_fraction;
            json methods = json::array();
            for (auto m : setup.methods) methods.push_back(to_string(m));
            summary["methods"] = methods;
            summary["warnings"] = setup.spec.provenance_warnings();
        }
        summary["tolerances"] = tol;
        summary["passed"] = all;
        summary["criteria"] = criteria_json(result.criteria);
        summary["measurements"] = ctx.measurements();
        ctx.write("summary.json", summary.dump(2) + "\n");
    } catch (const ParseError& e) {
        result.status = kStatusConfigError;
        result.error = e.what();
    } catch (const ConfigError& e) {
        result.status = kStatusConfigError;
        result.error = config.source() + ": " + e.what();
    } catch (const PreconditionError& e) {
        result.status = kStatusConfigError;
        result.error = config.source() + ": " + e.what();
    } catch (const BudgetExceeded& e) {
        result.status = kStatusConfigError;
        result.error = config.source() + ": " + e.what();
    }
    return result;
}

}  // namespace pathwise::experiment
