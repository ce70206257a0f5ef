#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tergm/analysis.hpp"
#include "tergm/simulation.hpp"
#include "tergm/terms.hpp"

namespace tergm {

// Declarative run configuration (JSON, schema_version 1). Input paths are
// resolved relative to the config file's directory; the output directory is
// resolved against the working directory (or the CLI -o flag).

struct MixingRequest {
    std::string attr;
    std::string period;  // period label or "all"
    bool self_exclusion = false;
};

struct ProbabilityRequest {
    std::string name;
    std::string period = "all";  // label or "all" (pooled)
    int m = 0;                   // 0 = exhaustive
    std::uint64_t seed = 0;
    bool per_period = false;  // also emit one row per modeled period
    SideSelector sender, receiver;
};

struct DecileRequest {
    std::string name;
    std::string period;
    std::string attr;  // numeric sender attribute
    int m = 0;
    std::uint64_t seed = 0;
    SideSelector receiver;
};

struct FitConfig {
    bool enabled = false;
    int bootstrap = 0;
    bool bootstrap_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tolerance = 1e-8;
    int max_iterations = 100;
};

struct SimulateConfig {
    bool enabled = false;
    int n = 0;
    int periods = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int burn_in = 200;
    int thinning = 10;
    std::map<std::string, double> theta;  // by term name
    AttributeGeneratorSpec attribute_generator;
};

struct RunConfig {
    int schema_version = 1;
    std::string config_path;  // as given
    std::string base_dir;     // directory of the config file

    std::string edges_path;  // resolved
    std::string attributes_path;
    std::vector<std::string> dyad_cov_paths;
    long long threshold = 0;
    int memory_order = 0;

    std::vector<AttributeSchema> attribute_schemas;
    ModelSpec model;
    FitConfig fit;
    SimulateConfig simulate;

    std::vector<MixingRequest> mixing;
    std::vector<ProbabilityRequest> probability;
    std::vector<DecileRequest> deciles;

    std::string output_dir = "out";
    int workers = 1;

    static RunConfig from_file(const std::string& path);
};

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Error;
    std::string message;
};

// Structural checks (term/attribute cross references, required seeds, level
// sets) plus data-dependent warnings when the input files are readable
// (sparse mixing cells, dropped dyads). Never throws: problems come back as
// diagnostics.
std::vector<Diagnostic> validate(const RunConfig& config);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Error) return true;
    return false;
}

}  // namespace tergm
