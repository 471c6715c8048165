#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semilin/errors.hpp"
#include "semilin/experiments.hpp"

using namespace semilin;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

ExperimentConfig configFor(const std::string& config, const std::string& templ)
{
    if (!templ.empty()) return parseExperiment(findTemplate(templ).config);
    return loadExperiment(config);
}

int run(const ExperimentConfig& config, const std::filesystem::path& root)
{
    ExperimentResult result;
    try {
        result = runExperiment(config);
    } catch (const Error& e) {
        std::cerr << config.name << ": numerical failure: " << e.what() << '\n';
        return kExitFail;
    }
    const auto dir = writeArtifacts(result, config, root);
    std::cout << result.text << "artifacts: " << dir.string() << '\n';
    return result.pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Experiments for corner probes and inclusion recovery in semilinear elliptic problems"};
    app.require_subcommand(1);

    std::string config, templ, out;
    auto* runCmd = app.add_subcommand("run", "Run an experiment and write its artifacts");
    auto* runSrc = runCmd->add_option_group("source");
    runSrc->add_option("config", config, "JSON experiment config")->check(CLI::ExistingFile);
    runSrc->add_option("-t,--template", templ, "Run a built-in template instead of a file");
    runSrc->require_option(1);
    runCmd->add_option("-o,--output-root", out, "Output root (default: $SEMILIN_OUTPUT_ROOT or ./results)");

    auto* validateCmd = app.add_subcommand("validate", "Parse and validate a config without running it");
    validateCmd->add_option("config", config, "JSON experiment config")->required();

    auto* listCmd = app.add_subcommand("list", "List the built-in experiment templates");

    std::string showName;
    auto* showCmd = app.add_subcommand("show", "Print a built-in template as JSON");
    showCmd->add_option("name", showName, "Template name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (*listCmd) {
            for (const auto& t : experimentTemplates()) {
                std::cout << t.name << "\n    " << t.anchor << " (criteria";
                for (int c : t.criteria) std::cout << ' ' << c;
                std::cout << ")\n";
            }
            return 0;
        }
        if (*showCmd) {
            std::cout << findTemplate(showName).config.dump(2) << '\n';
            return 0;
        }
        if (*validateCmd) {
            const ExperimentConfig c = loadExperiment(config);
            std::cout << c.name << " (" << kindName(c.kind) << "): valid\n";
            return 0;
        }
        const ExperimentConfig c = configFor(config, templ);
        return run(c, out.empty() ? outputRoot() : std::filesystem::path(out));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
}
