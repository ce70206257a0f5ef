// tergm command-line front end: validate | ingest | fit | simulate | report

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>

#include "tergm/config.hpp"
#include "tergm/pipeline.hpp"
#include "tergm/util.hpp"

namespace {

using tergm::Diagnostic;

nlohmann::ordered_json diagnostics_json(const std::vector<Diagnostic>& diags) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& d : diags) {
        nlohmann::ordered_json item;
        item["severity"] = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
        item["message"] = d.message;
        arr.push_back(std::move(item));
    }
    return arr;
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        std::cerr << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
                  << d.message << '\n';
}

struct CommonArgs {
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0;
    bool workers_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_outputs) {
    cmd->add_option("-c,--config", args.config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_outputs) {
        cmd->add_option("-o,--out", args.output_dir, "output directory (default from config)");
        cmd->add_option("--seed", args.seed, "override fit and simulate seeds")
            ->each([&](const std::string&) { args.seed_given = true; });
        cmd->add_option("--workers", args.workers, "worker thread count")
            ->each([&](const std::string&) { args.workers_given = true; });
    }
}

int run_mode(const CommonArgs& args, tergm::RunMode mode) {
    tergm::RunConfig config = tergm::RunConfig::from_file(args.config_path);
    tergm::RunOverrides overrides;
    if (!args.output_dir.empty()) overrides.output_dir = args.output_dir;
    if (args.seed_given) overrides.seed = args.seed;
    if (args.workers_given) {
        overrides.workers = args.workers;
    } else if (const char* env = std::getenv("TERGM_WORKERS")) {
        overrides.workers = static_cast<int>(tergm::parse_int(env));
    }

    tergm::RunResult result = tergm::run(config, mode, overrides);
    print_diagnostics(result.diagnostics);
    if (result.exit_code != 0) {
        nlohmann::ordered_json report;
        report["status"] = "failed";
        report["exit_code"] = result.exit_code;
        report["diagnostics"] = diagnostics_json(result.diagnostics);
        std::cout << report.dump(2) << std::endl;
    } else {
        for (const auto& f : result.outputs) std::cerr << "wrote " << f << '\n';
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TERGM estimation toolkit for longitudinal directed networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tergm::kToolVersion);

    CommonArgs validate_args, ingest_args, fit_args, simulate_args, report_args;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check a run configuration and its inputs");
    add_common(validate_cmd, validate_args, false);
    CLI::App* ingest_cmd =
        app.add_subcommand("ingest", "parse inputs, apply the threshold, summarize the panel");
    add_common(ingest_cmd, ingest_args, true);
    CLI::App* fit_cmd = app.add_subcommand("fit", "estimate the model with bootstrap intervals");
    add_common(fit_cmd, fit_args, true);
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "generate a synthetic panel and write its files");
    add_common(simulate_cmd, simulate_args, true);
    CLI::App* report_cmd =
        app.add_subcommand("report", "run the full pipeline and emit every configured report");
    add_common(report_cmd, report_args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            tergm::RunConfig config = tergm::RunConfig::from_file(validate_args.config_path);
            auto diags = tergm::validate(config);
            std::cout << diagnostics_json(diags).dump(2) << std::endl;
            print_diagnostics(diags);
            return tergm::has_errors(diags) ? 2 : 0;
        }
        if (ingest_cmd->parsed()) return run_mode(ingest_args, tergm::RunMode::Ingest);
        if (fit_cmd->parsed()) return run_mode(fit_args, tergm::RunMode::Fit);
        if (simulate_cmd->parsed()) return run_mode(simulate_args, tergm::RunMode::Simulate);
        if (report_cmd->parsed()) return run_mode(report_args, tergm::RunMode::Report);
    } catch (const tergm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        nlohmann::ordered_json report;
        report["status"] = "failed";
        report["exit_code"] = 1;
        report["diagnostics"] =
            diagnostics_json({{Diagnostic::Severity::Error, e.what()}});
        std::cout << report.dump(2) << std::endl;
        return 1;
    }
    return 0;
}
