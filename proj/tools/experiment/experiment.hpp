/**
 * @file experiment.hpp
 * @brief Config-driven experiments: one subcommand, one summary.json plus CSVs.
 */

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace pathwise::experiment {

/// Exit statuses of run_experiment.
inline constexpr int kStatusPassed = 0;
inline constexpr int kStatusCriterionFailed = 1;
inline constexpr int kStatusConfigError = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutEnvVar = "PATHWISE_OUT";

const std::vector<std::string>& subcommands();

/// Tolerance keys accepted in [tolerances] for a subcommand, with defaults.
const std::map<std::string, double>& default_tolerances(const std::string& subcommand);

struct Criterion {
    std::string name;
    bool passed;
    double measured;
    double threshold;
    std::string detail;
};

struct RunOptions {
    std::filesystem::path out_dir;
    int workers = 0;  ///< 0 defers to [run] workers in the config
};

struct RunResult {
    int status = kStatusPassed;
    std::vector<Criterion> criteria;
    std::string error;  ///< set when status is kStatusConfigError
};

/// $PATHWISE_OUT when set and non-empty, else "pathwise-out".
std::filesystem::path default_out_dir();

/// Runs `subcommand` on a parsed config and writes artifacts under options.out_dir.
/// Configuration problems are reported through RunResult (status 2), never thrown.
RunResult run_experiment(const std::string& subcommand, const Config& config,
                         const RunOptions& options);

}  // namespace pathwise::experiment
