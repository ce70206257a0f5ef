#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tergm/config.hpp"
#include "tergm/estimation.hpp"

namespace tergm {

inline constexpr const char* kToolVersion = "0.1.0";

// CLI-level overrides; seed replaces both fit.seed and simulate.seed.
struct RunOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

enum class RunMode {
    Ingest,    // parse inputs, threshold, write the panel summary
    Simulate,  // generate a synthetic panel and write its interchange files
    Fit,       // ingest/simulate, estimate, write fit artifacts
    Report,    // the full pipeline: everything configured
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 runtime failure, 2 validation failure
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> outputs;  // files written, relative to the output dir
};

// Executes the configured pipeline. Validation failures return exit code 2
// with diagnostics and no artifacts; runtime failures remove whatever
// partial outputs were written and return exit code 1. Identical config,
// inputs and seeds produce byte-identical artifacts for any worker count
// (the manifest, which records timings, is the one exception).
RunResult run(const RunConfig& config, RunMode mode = RunMode::Report,
              const RunOverrides& overrides = {});

// Artifact writers, shared with the test suites.
void write_coefficients_csv(const std::string& path, const FitResult& fit);
void write_replicates_csv(const std::string& path, const FitResult& fit);
void write_fit_json(const std::string& path, const FitResult& fit);

}  // namespace tergm
