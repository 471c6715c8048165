#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "semilin/errors.hpp"
#include "semilin/experiments.hpp"

using namespace semilin;
namespace fs = std::filesystem;

namespace {

Json sectorConfig()
{
    return Json::parse(R"({
      "name": "sector", "kind": "cornerDecay",
      "params": {
        "corner": {"dim": 2, "half_angle": 0.7853981633974483, "radius": 1},
        "taus": {"min": 20, "max": 200, "count": 10},
        "sweeps": [{"quantity": "cornerIntegral", "slope": {"expected": -2, "tol": 0.05}}]
      }})");
}

fs::path scratchDir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("semilin_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int runCli(const std::string& args)
{
    const int status = std::system((std::string(SEMILIN_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("every template parses and names its criteria")
{
    const auto all = experimentTemplates();
    CHECK(all.size() >= 10);
    std::set<int> covered;
    std::set<std::string> names;
    for (const auto& t : all) {
        CAPTURE(t.name);
        CHECK_NOTHROW(parseExperiment(t.config));
        CHECK_FALSE(t.criteria.empty());
        CHECK(names.insert(t.name).second);
        covered.insert(t.criteria.begin(), t.criteria.end());
    }
    for (int c = 1; c <= 14; ++c) CHECK(covered.count(c) == 1);
}

TEST_CASE("the class A nest template has one measurement per layer coefficient")
{
    const Json& p = findTemplate("two-layer-nest-class-a").config.at("params");
    CHECK(p.at("content").at("class") == "A");
    std::size_t unknowns = 0;
    for (const auto& l : p.at("content").at("layers")) unknowns += l.size();
    CHECK(p.at("measurements").size() == unknowns);
    CHECK_THROWS_AS(findTemplate("no-such-template"), ConfigError);
}

TEST_CASE("config validation names the offending key")
{
    Json c = sectorConfig();
    c["params"]["bogus"] = 1;
    CHECK_THROWS_WITH_AS(parseExperiment(c), doctest::Contains("bogus"), ConfigError);

    c = sectorConfig();
    c["kind"] = "nope";
    CHECK_THROWS_AS(parseExperiment(c), ConfigError);

    c = sectorConfig();
    c["params"]["taus"]["count"] = 3;
    CHECK_THROWS_AS(parseExperiment(c), ConfigError);

    c = sectorConfig();
    c["output_dir"] = "../escape";
    CHECK_THROWS_AS(parseExperiment(c), ConfigError);

    Json shape = findTemplate("triangle-recovery").config;
    shape["params"]["data_h"] = 0.05;
    CHECK_THROWS_WITH_AS(parseExperiment(shape), doctest::Contains("data_h"), ConfigError);

    Json nest = findTemplate("square-nest-class-b").config;
    nest["params"]["truth"][1] = Json::parse(R"({"rectangle": [0.5, 0.5, 0.9, 0.7]})");
    CHECK_THROWS_AS(parseExperiment(nest), ConfigError);
}

TEST_CASE("identical config and seed give byte-identical artifacts")
{
    const ExperimentConfig c = parseExperiment(sectorConfig());
    const fs::path a = scratchDir("det_a"), b = scratchDir("det_b");
    const ExperimentResult r1 = runExperiment(c);
    const ExperimentResult r2 = runExperiment(c);
    CHECK(r1.pass);
    writeArtifacts(r1, c, a);
    writeArtifacts(r2, c, b);
    REQUIRE(r1.artifacts.size() == r2.artifacts.size());
    for (const auto& art : r1.artifacts) CHECK(slurp(a / "sector" / art.file) == slurp(b / "sector" / art.file));
    CHECK(fs::exists(a / "sector" / "summary.json"));
    CHECK(fs::exists(a / "sector" / "summary.txt"));
}

TEST_CASE("CLI exit codes")
{
    const fs::path root = scratchDir("cli");
    fs::create_directories(root);
    const fs::path bad = root / "bad.json";
    std::ofstream(bad) << "{ \"name\": \"broken\", \"kind\": \"cornerDecay\", ";
    const fs::path invalid = root / "invalid.json";
    std::ofstream(invalid) << R"({"name": "invalid", "kind": "cornerDecay", "params": {"taus": 1}})";
    const std::string out = " -o " + (root / "out").string();

    CHECK(runCli("list") == 0);
    CHECK(runCli("validate " + bad.string()) == 2);
    CHECK(runCli("run " + bad.string() + out) == 2);
    CHECK(runCli("run " + invalid.string() + out) == 2);
    CHECK_FALSE(fs::exists(root / "out"));
    CHECK(runCli("run -t forward-zero-data" + out) == 0);
    CHECK(fs::exists(root / "out" / "forward-zero-data" / "summary.json"));
    CHECK(runCli("run -t assumption-a-violated" + out) == 0);
}
