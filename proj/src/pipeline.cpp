#include "tergm/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "tergm/analysis.hpp"
#include "tergm/io.hpp"
#include "tergm/rng.hpp"
#include "tergm/simulation.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

class StageClock {
public:
    void start() { t0_ = std::chrono::steady_clock::now(); }
    long long stop() {
        auto dt = std::chrono::steady_clock::now() - t0_;
        return std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

// tracks artifacts so a failed run can remove its partial outputs
struct OutputTracker {
    fs::path dir;
    std::vector<std::string> written;

    std::string path(const std::string& name) {
        written.push_back(name);
        return (dir / name).string();
    }
    void discard_all() {
        for (const auto& name : written) {
            std::error_code ec;
            fs::remove(dir / name, ec);
        }
        written.clear();
    }
};

std::string csv_cell(double v) { return format_double(v); }

void write_panel_summary(const std::string& path, const PanelNetwork& panel) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "period,nodes,ties,density\n";
    for (int t = 0; t < panel.period_count(); ++t) {
        const PanelPeriod& p = panel.period(t);
        long long ties = p.binary ? p.binary->edge_count() : 0;
        auto n = static_cast<long long>(p.size());
        double density = n > 1 ? static_cast<double>(ties) / static_cast<double>(n * (n - 1)) : 0.0;
        out << p.label << ',' << n << ',' << ties << ',' << csv_cell(density) << '\n';
    }
}

Eigen::VectorXd theta_from_config(const RunConfig& cfg) {
    Eigen::VectorXd theta(cfg.model.term_count());
    for (int c = 0; c < cfg.model.term_count(); ++c) {
        const std::string& name = cfg.model.terms[static_cast<std::size_t>(c)].name();
        auto it = cfg.simulate.theta.find(name);
        if (it == cfg.simulate.theta.end())
            throw Error("simulate.theta is missing a value for term '" + name + "'");
        theta(c) = it->second;
    }
    return theta;
}

PanelNetwork acquire_panel(const RunConfig& cfg, std::uint64_t sim_seed,
                           std::vector<Diagnostic>& diags,
                           std::vector<std::string>* input_files) {
    if (cfg.simulate.enabled) {
        GibbsOptions chain;
        chain.burn_in = cfg.simulate.burn_in;
        chain.thinning = cfg.simulate.thinning;
        PanelNetwork panel = simulate_panel(cfg.simulate.n, cfg.simulate.periods, cfg.model,
                                            theta_from_config(cfg),
                                            cfg.simulate.attribute_generator, sim_seed, chain,
                                            cfg.workers, cfg.memory_order);
        return panel;
    }
    auto edges = read_edge_list(cfg.edges_path);
    input_files->push_back(cfg.edges_path);
    AttributeTable attrs;
    if (!cfg.attributes_path.empty()) {
        attrs = read_attributes(cfg.attributes_path, cfg.attribute_schemas);
        input_files->push_back(cfg.attributes_path);
    } else {
        for (const auto& s : cfg.attribute_schemas) attrs.declare(s);
    }
    std::vector<DyadCovRow> cov_rows;
    for (const auto& path : cfg.dyad_cov_paths) {
        auto rows = read_dyad_covariates(path);
        cov_rows.insert(cov_rows.end(), rows.begin(), rows.end());
        input_files->push_back(path);
    }
    IngestResult ingest = assemble_panel(edges, std::move(attrs), cov_rows, cfg.memory_order);
    for (const auto& w : ingest.warnings)
        diags.push_back({Diagnostic::Severity::Warning, w});
    return ingest.panel.thresholded(cfg.threshold);
}

std::vector<int> mixing_periods(const PanelNetwork& panel, const std::string& period) {
    if (period == "all") return panel.modeled_periods();
    int t = panel.period_index(period);
    if (t < 0) throw Error("unknown period '" + period + "'");
    return {t};
}

void write_mixing(const std::string& path, const RunConfig& cfg, const PanelNetwork& panel) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "attr,period,sender_group,receiver_group,tie_count,observed_share,baseline_share,"
           "preferential\n";
    for (const auto& req : cfg.mixing) {
        for (int t : mixing_periods(panel, req.period)) {
            Covariates covs = covariates_for_period(panel, t);
            auto it = covs.categorical.find(req.attr);
            if (it == covs.categorical.end())
                throw Error("mixing: attribute '" + req.attr + "' missing in period '" +
                            panel.period(t).label + "'");
            MixingReport report = mixing_matrix(*panel.period(t).binary, it->second, req.attr,
                                                req.self_exclusion);
            auto L = report.levels.size();
            for (std::size_t g = 0; g < L; ++g)
                for (std::size_t h = 0; h < L; ++h)
                    out << req.attr << ',' << panel.period(t).label << ',' << report.levels[g]
                        << ',' << report.levels[h] << ',' << report.tie_counts[g][h] << ','
                        << csv_cell(report.observed[g][h]) << ','
                        << csv_cell(report.baseline_used[g][h]) << ','
                        << csv_cell(report.preferential[g][h]) << '\n';
        }
    }
}

void write_probability_row(std::ofstream& out, const std::string& name,
                           const ProbabilitySummary& s) {
    out << name << ',' << s.selector << ',' << s.period << ',' << s.matches << ','
        << s.sample_size << ',' << csv_cell(s.median) << ',' << csv_cell(s.q25) << ','
        << csv_cell(s.q75) << ',' << s.seed << '\n';
}

void write_probabilities(const std::string& path, const RunConfig& cfg,
                         const PanelNetwork& panel, const Eigen::VectorXd& theta) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "name,selector,period,matches,sample_size,median,q25,q75,seed\n";
    for (const auto& req : cfg.probability) {
        DyadSelector sel;
        sel.sender = req.sender;
        sel.receiver = req.receiver;
        if (req.period == "all") {
            write_probability_row(out, req.name,
                                  dyad_probability_sample(theta, cfg.model, panel, -1, sel, req.m,
                                                          req.seed));
            if (req.per_period)
                for (int t : panel.modeled_periods())
                    write_probability_row(
                        out, req.name,
                        dyad_probability_sample(
                            theta, cfg.model, panel, t, sel, req.m,
                            Rng::substream(req.seed, static_cast<std::uint64_t>(t)).raw()));
        } else {
            int t = panel.period_index(req.period);
            if (t < 0)
                throw Error("probability '" + req.name + "': unknown period '" + req.period + "'");
            write_probability_row(out, req.name,
                                  dyad_probability_sample(theta, cfg.model, panel, t, sel, req.m,
                                                          req.seed));
        }
    }
}

void write_deciles(const std::string& path, const RunConfig& cfg, const PanelNetwork& panel,
                   const Eigen::VectorXd& theta) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "name,period,decile,lower,upper,matches,sample_size,median,q25,q75\n";
    for (const auto& req : cfg.deciles) {
        int t = panel.period_index(req.period);
        if (t < 0)
            throw Error("deciles '" + req.name + "': unknown period '" + req.period + "'");
        DecileCurve curve =
            decile_curve(theta, cfg.model, panel, t, req.attr, req.receiver, req.m, req.seed);
        for (const auto& band : curve.bands)
            out << req.name << ',' << req.period << ',' << band.decile + 1 << ','
                << csv_cell(band.lower) << ',' << csv_cell(band.upper) << ','
                << band.summary.matches << ',' << band.summary.sample_size << ','
                << csv_cell(band.summary.median) << ',' << csv_cell(band.summary.q25) << ','
                << csv_cell(band.summary.q75) << '\n';
    }
}

void write_recovery(const std::string& path, const RunConfig& cfg, const FitResult& fit,
                    const Eigen::VectorXd& truth) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "term,true_value,estimate,ci_lower,ci_upper,covered\n";
    for (int c = 0; c < static_cast<int>(fit.term_names.size()); ++c) {
        bool covered = truth(c) >= fit.ci_lower(c) && truth(c) <= fit.ci_upper(c);
        out << fit.term_names[static_cast<std::size_t>(c)] << ',' << csv_cell(truth(c)) << ','
            << csv_cell(fit.theta(c)) << ',' << csv_cell(fit.ci_lower(c)) << ','
            << csv_cell(fit.ci_upper(c)) << ',' << (covered ? 1 : 0) << '\n';
    }
    (void)cfg;
}

}  // namespace

void write_coefficients_csv(const std::string& path, const FitResult& fit) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "term,estimate,2.5%,97.5%\n";
    for (std::size_t c = 0; c < fit.term_names.size(); ++c)
        out << fit.term_names[c] << ',' << csv_cell(fit.theta(static_cast<Eigen::Index>(c)))
            << ',' << csv_cell(fit.ci_lower(static_cast<Eigen::Index>(c))) << ','
            << csv_cell(fit.ci_upper(static_cast<Eigen::Index>(c))) << '\n';
}

void write_replicates_csv(const std::string& path, const FitResult& fit) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "replicate";
    for (const auto& name : fit.term_names) out << ',' << name;
    out << ",ok,ridged\n";
    for (Eigen::Index b = 0; b < fit.replicates.rows(); ++b) {
        out << b + 1;
        for (Eigen::Index c = 0; c < fit.replicates.cols(); ++c)
            out << ',' << csv_cell(fit.replicates(b, c));
        out << ',' << int(fit.replicate_ok[static_cast<std::size_t>(b)]) << ','
            << int(fit.replicate_ridged[static_cast<std::size_t>(b)]) << '\n';
    }
}

void write_fit_json(const std::string& path, const FitResult& fit) {
    ordered_json j;
    j["terms"] = fit.term_names;
    j["estimate"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
    j["ci_lower"] =
        std::vector<double>(fit.ci_lower.data(), fit.ci_lower.data() + fit.ci_lower.size());
    j["ci_upper"] =
        std::vector<double>(fit.ci_upper.data(), fit.ci_upper.data() + fit.ci_upper.size());
    j["bootstrap"] = fit.requested_replicates;
    j["seed"] = fit.seed;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["gradient_norm"] = fit.grad_norm;
    j["log_pseudolikelihood"] = fit.log_pl;
    j["separation"] = fit.separation;
    j["ridge"] = fit.ridge;
    j["failed_replicates"] = fit.failed_replicates;
    j["failure_warning"] = fit.failure_warning;
    int ridged = 0;
    for (auto flag : fit.replicate_ridged) ridged += flag;
    j["ridged_replicates"] = ridged;
    j["dropped_dyads"] = fit.dropped_rows;
    j["design_rows"] = fit.design_rows;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

RunResult run(const RunConfig& config, RunMode mode, const RunOverrides& overrides) {
    RunResult result;
    result.diagnostics = validate(config);
    if (has_errors(result.diagnostics)) {
        result.exit_code = 2;
        return result;
    }

    RunConfig cfg = config;
    if (overrides.seed) {
        cfg.fit.seed = *overrides.seed;
        cfg.simulate.seed = *overrides.seed;
    }
    if (overrides.workers) cfg.workers = *overrides.workers;

    OutputTracker tracker;
    tracker.dir = overrides.output_dir ? *overrides.output_dir : cfg.output_dir;
    fs::create_directories(tracker.dir);

    ordered_json timings;
    StageClock clock;
    StageClock total_clock;
    total_clock.start();
    std::vector<std::string> input_files;

    try {
        clock.start();
        PanelNetwork panel = acquire_panel(cfg, cfg.simulate.seed, result.diagnostics,
                                           &input_files);
        timings[cfg.simulate.enabled ? "simulate" : "ingest"] = clock.stop();

        if (cfg.simulate.enabled && (mode == RunMode::Simulate || mode == RunMode::Report)) {
            write_edge_list(tracker.path("simulated_edges.csv"), panel);
            write_attributes(tracker.path("simulated_attributes.csv"), panel);
        }
        if (mode == RunMode::Ingest || mode == RunMode::Report)
            write_panel_summary(tracker.path("panel_summary.csv"), panel);

        FitResult fit;
        bool fitted = false;
        if (cfg.fit.enabled && (mode == RunMode::Fit || mode == RunMode::Report)) {
            clock.start();
            BootstrapOptions opts;
            opts.replicates = cfg.fit.bootstrap;
            opts.seed = cfg.fit.seed;
            opts.workers = cfg.workers;
            opts.mple.tolerance = cfg.fit.tolerance;
            opts.mple.max_iterations = cfg.fit.max_iterations;
            fit = bootstrap_fit(panel, cfg.model, opts);
            fitted = true;
            timings["fit"] = clock.stop();

            write_coefficients_csv(tracker.path("coefficients.csv"), fit);
            write_replicates_csv(tracker.path("replicates.csv"), fit);
            write_fit_json(tracker.path("fit.json"), fit);
            if (cfg.simulate.enabled)
                write_recovery(tracker.path("recovery.csv"), cfg, fit, theta_from_config(cfg));
            if (fit.failure_warning)
                result.diagnostics.push_back(
                    {Diagnostic::Severity::Warning,
                     std::to_string(fit.failed_replicates) + " of " +
                         std::to_string(fit.requested_replicates) +
                         " bootstrap replicates failed"});
            if (fit.separation)
                result.diagnostics.push_back(
                    {Diagnostic::Severity::Warning,
                     "complete separation detected; estimates use an L2 ridge of " +
                         format_double(fit.ridge)});
        }

        if (mode == RunMode::Report) {
            clock.start();
            if (!cfg.mixing.empty()) write_mixing(tracker.path("mixing.csv"), cfg, panel);
            if (!cfg.probability.empty()) {
                if (!fitted) throw Error("probability requests need a fit");
                write_probabilities(tracker.path("probability.csv"), cfg, panel, fit.theta);
            }
            if (!cfg.deciles.empty()) {
                if (!fitted) throw Error("decile requests need a fit");
                write_deciles(tracker.path("deciles.csv"), cfg, panel, fit.theta);
            }
            timings["analysis"] = clock.stop();
        }

        // manifest last; carries timings, so it is the one artifact that is
        // not byte-reproducible across runs
        ordered_json manifest;
        manifest["tool"] = "tergm";
        manifest["version"] = kToolVersion;
        manifest["command"] = mode == RunMode::Ingest     ? "ingest"
                              : mode == RunMode::Simulate ? "simulate"
                              : mode == RunMode::Fit      ? "fit"
                                                          : "report";
        manifest["config_path"] = cfg.config_path;
        manifest["config_digest"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.config_path));
        ordered_json digests = ordered_json::object();
        for (const auto& path : input_files)
            digests[path] = "fnv1a64:" + hex64(fnv1a64_file(path));
        manifest["input_digests"] = digests;
        manifest["threshold"] = cfg.threshold;
        manifest["memory_order"] = cfg.memory_order;
        if (cfg.fit.enabled) {
            manifest["fit_seed"] = cfg.fit.seed;
            manifest["bootstrap"] = cfg.fit.bootstrap;
        }
        if (cfg.simulate.enabled) manifest["simulate_seed"] = cfg.simulate.seed;
        manifest["workers"] = cfg.workers;
        timings["total"] = total_clock.stop();
        manifest["timings_ms"] = timings;
        manifest["outputs"] = tracker.written;
        std::ofstream out(tracker.path("manifest.json"));
        if (!out) throw Error("cannot write manifest.json");
        out << manifest.dump(2) << '\n';
    } catch (const Error& e) {
        tracker.discard_all();
        result.diagnostics.push_back({Diagnostic::Severity::Error, e.what()});
        result.exit_code = 1;
        return result;
    }

    result.outputs = tracker.written;
    return result;
}

}  // namespace tergm
