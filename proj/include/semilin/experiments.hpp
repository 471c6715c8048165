#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace semilin {

using Json = nlohmann::json;

enum class ExperimentKind { forward, cornerDecay, extraction, shapeRecover, coeffRecover, nestRecover, admissibility, distinguish };

std::string kindName(ExperimentKind kind);

/// A parsed and fully validated experiment. `params` is kept verbatim so the
/// run can rebuild the typed setup; parseExperiment has already done so once.
struct ExperimentConfig {
    std::string name;
    ExperimentKind kind = ExperimentKind::forward;
    std::uint64_t seed = 0;
    std::string outputDir;  // relative to the output root
    Json params;
};

/// Throws ConfigError naming the offending key for unknown kinds, missing or
/// mistyped fields, unknown keys, invalid geometry or content, and paths that
/// do not exist.
ExperimentConfig parseExperiment(const Json& config);
ExperimentConfig loadExperiment(const std::filesystem::path& file);

struct Artifact {
    std::string file;  // name inside the output directory
    std::string content;
};

struct ExperimentResult {
    std::string name;
    ExperimentKind kind = ExperimentKind::forward;
    bool pass = false;
    Json summary;  // metrics and the pass criteria they were held to
    std::vector<Artifact> artifacts;
    std::string text;  // human-readable summary
    double seconds = 0.0;
};

/// Runs the experiment in memory. Numerical failures propagate as the
/// library's exceptions.
ExperimentResult runExperiment(const ExperimentConfig& config);

/// Writes summary.json, summary.txt and the artifacts to root / outputDir.
std::filesystem::path writeArtifacts(const ExperimentResult& result, const ExperimentConfig& config,
                                     const std::filesystem::path& root);

/// SEMILIN_OUTPUT_ROOT, or ./results when unset.
std::filesystem::path outputRoot();

struct ExperimentTemplate {
    std::string name;
    std::string anchor;     // the result it exercises
    std::vector<int> criteria;  // acceptance criteria it backs
    Json config;
};

std::vector<ExperimentTemplate> experimentTemplates();
/// Throws ConfigError for unknown names.
const ExperimentTemplate& findTemplate(const std::string& name);

}  // namespace semilin
