#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "experiment/experiment.hpp"
#include "support.hpp"

namespace ex = pathwise::experiment;
namespace fs = std::filesystem;

namespace {

const char* kSmallQuadratic =
    "[problem]\n"
    "N = 40\n"
    "terminal = quadratic\n"
    "[grid]\n"
    "M = 81\n"
    "[run]\n"
    "seeds = 1..3\n"
    "methods = shift, splitting\n";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ex::RunResult run(const std::string& sub, const std::string& text, const fs::path& out, int workers = 1) {
    return ex::run_experiment(sub, ex::Config::parse(text, "case.ini"), {out, workers});
}

}  // namespace

TEST_CASE("value on the zero problem") {
    const auto out = testing::scratch_dir("exp-zero");
    const std::string text = "[problem]\nterminal = zero\nN = 20\n[grid]\nM = 41\n[run]\nseeds = 4, 2\n";
    const auto r = run("value", text, out);
    REQUIRE(r.status == ex::kStatusPassed);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["measurements"]["max_abs_U"].get<double>() <= 1e-12);
    CHECK(summary["config"]["fnv1a64"] == ex::Config::parse(text).hash());
    CHECK(summary["seeds"] == nlohmann::json::array({4, 2}));
    CHECK(summary["passed"] == true);
    CHECK(fs::exists(out / "seed_4" / "shift" / "value_index.csv"));
    CHECK(fs::exists(out / "seed_2" / "path.csv"));
}

TEST_CASE("re-runs are byte-identical regardless of worker count") {
    const auto a = testing::scratch_dir("exp-det-a");
    const auto b = testing::scratch_dir("exp-det-b");
    REQUIRE(run("value", kSmallQuadratic, a, 1).status == ex::kStatusPassed);
    REQUIRE(run("value", kSmallQuadratic, b, 3).status == ex::kStatusPassed);
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), a);
        REQUIRE(fs::exists(b / rel));
        CHECK_MESSAGE(slurp(e.path()) == slurp(b / rel), rel.string());
        ++files;
    }
    CHECK(files > 10);
}

TEST_CASE("a failing criterion gives status 1") {
    const auto out = testing::scratch_dir("exp-fail");
    const auto r = run("value", std::string(kSmallQuadratic) + "[tolerances]\nclosed_form_rel = 1e-9\n", out);
    CHECK(r.status == ex::kStatusCriterionFailed);
    bool found = false;
    for (const auto& c : r.criteria) {
        if (c.name == "closed_form") {
            found = true;
            CHECK_FALSE(c.passed);
            CHECK(c.measured > c.threshold);
        }
    }
    CHECK(found);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["passed"] == false);
}

TEST_CASE("config problems give status 2 with a location") {
    const auto out = testing::scratch_dir("exp-bad");
    auto r = run("value", "[problem]\nN = 40\nterminall = zero\n", out);
    CHECK(r.status == ex::kStatusConfigError);
    CHECK(r.error.find("case.ini:3") != std::string::npos);
    CHECK(r.error.find("problem.terminall") != std::string::npos);

    r = run("value", "[problem]\nterminal = parabola\n", out);
    CHECK(r.status == ex::kStatusConfigError);
    CHECK(r.error.find("case.ini:2") != std::string::npos);

    r = run("dpp", "[tolerances]\ndpp_residual = -1\n", out);
    CHECK(r.status == ex::kStatusConfigError);
    CHECK(r.error.find("tolerances.dpp_residual") != std::string::npos);

    r = run("invariants", "[problem]\ndim = 1\n[invariants]\nsymmetries = rotation\n", out);
    CHECK(r.status == ex::kStatusConfigError);

    r = run("comparison", "[problem]\nN = 10\n[grid]\nM = 21\n[comparison]\nlower = constant\nlower.c = 5\n", out);
    CHECK(r.status == ex::kStatusConfigError);
    CHECK(r.error.find("not ordered") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "summary.json"));
}

TEST_CASE("oracle-compare on the four-step instance") {
    const auto out = testing::scratch_dir("exp-oracle");
    const auto r = run("oracle-compare",
                       "[problem]\nterminal = quadratic\n[run]\nseeds = 3\n[oracle]\nK_ctrl = 20\npoints = 0.7\n", out);
    CHECK(r.status == ex::kStatusPassed);
    REQUIRE(r.criteria.size() == 2);
    CHECK(r.criteria[0].name == "oracle_gap");
    CHECK(r.criteria[0].measured <= 0.05);
    CHECK(r.criteria[1].measured <= 1e-9);
    CHECK(fs::exists(out / "oracle.csv"));
}

TEST_CASE("every subcommand has tolerance defaults") {
    for (const auto& s : ex::subcommands()) CHECK_FALSE(ex::default_tolerances(s).empty());
    CHECK(ex::default_tolerances("value").at("closed_form_rel") == 0.02);
    CHECK(ex::default_tolerances("hopf-cole").at("gaussian") == 1e-6);
}

TEST_CASE("default output directory honours the environment") {
    ::setenv(ex::kOutEnvVar, "/tmp/somewhere", 1);
    CHECK(ex::default_out_dir() == fs::path("/tmp/somewhere"));
    ::unsetenv(ex::kOutEnvVar);
    CHECK(ex::default_out_dir() == fs::path("pathwise-out"));
}
