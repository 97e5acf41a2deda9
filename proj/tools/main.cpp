// pathwise: run one configured experiment and report per-criterion results.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "experiment/config.hpp"
#include "experiment/experiment.hpp"

int main(int argc, char** argv) {
    namespace ex = pathwise::experiment;

    CLI::App app{"Pathwise optimal control experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PATHWISE_VERSION);

    std::string config_file;
    std::string out_dir;
    int workers = 0;
    const std::map<std::string, std::string> descriptions{
        {"value", "solve the value process and check closed forms and continuity moduli"},
        {"oracle-compare", "compare the solver with brute-force lattice enumeration and DP"},
        {"dpp", "dynamic programming residuals over m-step windows"},
        {"drift", "optimal drift: momentum identity, drift SPDE residual, terminal condition"},
        {"invariants", "conserved quantities along optimal trajectories"},
        {"comparison", "comparison principle and constant-shift checks"},
        {"convergence", "refinement study and cross-method gaps"},
        {"hopf-cole", "heat-kernel reference for the stochastic heat equation"},
    };
    for (const auto& name : ex::subcommands()) {
        auto* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", config_file, "experiment file")->required();
        sub->add_option("--out", out_dir, std::string("output directory (default $") + ex::kOutEnvVar +
                                              " or ./pathwise-out)");
        sub->add_option("--workers", workers, "worker threads (overrides [run] workers)")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ex::kStatusConfigError;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    ex::Config config;
    try {
        config = ex::Config::load(config_file);
    } catch (const ex::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ex::kStatusConfigError;
    }

    ex::RunOptions options;
    options.out_dir = out_dir.empty() ? ex::default_out_dir() : std::filesystem::path(out_dir);
    options.workers = workers;
    const auto result = ex::run_experiment(subcommand, config, options);
    if (result.status == ex::kStatusConfigError) {
        std::cerr << "error: " << result.error << "\n";
        return result.status;
    }
    for (const auto& c : result.criteria) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << c.measured
                  << " threshold=" << c.threshold;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
    }
    std::cout << "summary: " << (options.out_dir / "summary.json").string() << "\n";
    return result.status;
}
