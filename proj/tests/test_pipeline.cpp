#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "tergm/config.hpp"
#include "tergm/pipeline.hpp"
#include "tergm/util.hpp"

using namespace tergm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("tergm_pipeline_" + std::to_string(::getpid()) +
                                                "_" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
    fs::path path = dir / "config.json";
    std::ofstream out(path);
    out << body;
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSimulateFitConfig = R"({
  "simulate": {
    "n": 12, "periods": 3, "seed": 5, "burn_in": 50, "thinning": 5,
    "theta": {"Edges": -1.5, "Reciprocity": 0.8, "A -> A": 0.7},
    "attribute_generator": {
      "categorical": [{"name": "grp", "levels": ["a", "b"], "shares": [0.5, 0.5]}]
    }
  },
  "model": {"terms": [
    {"kind": "edges", "name": "Edges"},
    {"kind": "reciprocity", "name": "Reciprocity"},
    {"kind": "node_mix", "attr": "grp", "sender_level": "a", "receiver_level": "a"}
  ]},
  "fit": {"bootstrap": 30, "seed": 11},
  "analysis": {
    "mixing": [{"attr": "grp", "period": "all"}],
    "probability": [{"name": "aa", "period": "all", "m": 50, "seed": 3, "per_period": true,
                     "sender": {"grp": "a"}, "receiver": {"grp": "a"}}]
  },
  "output_dir": "unused",
  "workers": 1
})";

}  // namespace

TEST_CASE("the bundled paper model expands to the 38 published rows in order") {
    RunConfig cfg = RunConfig::from_file("configs/paper_model.json");
    auto diags = validate(cfg);
    CHECK_FALSE(has_errors(diags));

    const std::vector<std::string> expected = {
        "Edges", "Reciprocity", "Sociality", "Popularity", "Transitivity",
        "Electoral Margin", "Seniority", "Ideology", "Majority Party",
        "Ideological Extremity", "Percent Black Population", "Percent Hispanic Population",
        "Bills Sponsored", "Race Bills Sponsored", "Latino * Race Bills", "Black * Race Bills",
        "Same Committee", "Ideological Distance", "Same Party",
        "Black -> White", "Latino -> White", "White -> Black", "Black -> Black",
        "Latino -> Black", "White -> Latino", "Black -> Latino", "Latino -> Latino",
        "Women -> Men", "Men -> Women", "Women -> Women",
        "Black District * White Sponsor", "Black District * Black Sponsor",
        "Latino District * White Sponsor", "Latino District * Latino Sponsor",
        "Congress", "Congress^2", "Congress^3", "Party Homophily"};
    CHECK(cfg.model.term_names() == expected);
    REQUIRE(cfg.model.reference_exclusions.size() == 2);
    CHECK(cfg.model.reference_exclusions[0].sender_level == "white");
    CHECK(cfg.model.reference_exclusions[1].sender_level == "men");
}

TEST_CASE("validation catches cross-reference mistakes") {
    fs::path dir = temp_dir();

    SUBCASE("node mix against an undeclared level") {
        std::string path = write_config(dir, R"({
          "simulate": {"n": 6, "periods": 2, "seed": 1,
            "theta": {"Edges": 0.0, "Zz -> Zz": 0.0},
            "attribute_generator": {"categorical": [
              {"name": "grp", "levels": ["a", "b"], "shares": [0.5, 0.5]}]}},
          "model": {"terms": [
            {"kind": "edges", "name": "Edges"},
            {"kind": "node_mix", "attr": "grp", "sender_level": "zz", "receiver_level": "zz"}
          ]}
        })");
        auto diags = validate(RunConfig::from_file(path));
        CHECK(has_errors(diags));
        bool found = false;
        for (const auto& d : diags)
            if (d.message.find("'zz' is not a declared level") != std::string::npos) found = true;
        CHECK(found);
    }

    SUBCASE("empty model is an error") {
        std::string path = write_config(dir, R"({
          "simulate": {"n": 6, "periods": 2, "seed": 1, "theta": {},
            "attribute_generator": {}},
          "model": {"terms": []}
        })");
        auto diags = validate(RunConfig::from_file(path));
        CHECK(has_errors(diags));
    }

    SUBCASE("fit needs bootstrap count and seed") {
        std::string path = write_config(dir, R"({
          "simulate": {"n": 6, "periods": 2, "seed": 1, "theta": {"Edges": 0.0},
            "attribute_generator": {}},
          "model": {"terms": [{"kind": "edges", "name": "Edges"}]},
          "fit": {}
        })");
        auto diags = validate(RunConfig::from_file(path));
        int errors = 0;
        for (const auto& d : diags)
            if (d.severity == Diagnostic::Severity::Error) ++errors;
        CHECK(errors == 2);
    }

    SUBCASE("probability request without a fit section") {
        std::string path = write_config(dir, R"({
          "simulate": {"n": 6, "periods": 2, "seed": 1, "theta": {"Edges": 0.0},
            "attribute_generator": {}},
          "model": {"terms": [{"kind": "edges", "name": "Edges"}]},
          "analysis": {"probability": [{"name": "p", "period": "all"}]}
        })");
        auto diags = validate(RunConfig::from_file(path));
        CHECK(has_errors(diags));
    }

    SUBCASE("a fully valid config has no error diagnostics") {
        std::string path = write_config(dir, kSimulateFitConfig);
        auto diags = validate(RunConfig::from_file(path));
        CHECK_FALSE(has_errors(diags));
    }

    SUBCASE("simulated panels cannot feed non-lag dyad covariate terms") {
        std::string path = write_config(dir, R"({
          "simulate": {"n": 6, "periods": 3, "seed": 1,
            "theta": {"Edges": 0.0, "DyadCov committee": 0.0},
            "attribute_generator": {}},
          "model": {"terms": [
            {"kind": "edges", "name": "Edges"},
            {"kind": "dyad_cov", "cov": "committee"}
          ]}
        })");
        auto diags = validate(RunConfig::from_file(path));
        bool found = false;
        for (const auto& d : diags)
            if (d.message.find("cannot supply dyad covariate 'committee'") != std::string::npos)
                found = true;
        CHECK(found);
    }

    SUBCASE("dyad covariate terms must appear in the covariate files") {
        fs::path edges = dir / "e.csv";
        {
            std::ofstream out(edges);
            out << "period_label,sender_id,receiver_id,weight\n1,a,b,2\n2,b,a,2\n";
        }
        std::string path = write_config(dir, R"({
          "inputs": {"edges": "e.csv"},
          "threshold": 1,
          "model": {"terms": [
            {"kind": "edges", "name": "Edges"},
            {"kind": "dyad_cov", "cov": "ghost_cov"}
          ]},
          "fit": {"bootstrap": 5, "seed": 1}
        })");
        auto diags = validate(RunConfig::from_file(path));
        bool found = false;
        for (const auto& d : diags)
            if (d.message.find("'ghost_cov'") != std::string::npos &&
                d.message.find("no dyad-covariate file") != std::string::npos)
                found = true;
        CHECK(found);
    }

    fs::remove_all(dir);
}

TEST_CASE("simulated panels carry the configured memory order for lag terms") {
    fs::path dir = temp_dir();
    std::string path = write_config(dir, R"({
      "simulate": {"n": 8, "periods": 3, "seed": 9, "burn_in": 30,
        "theta": {"Edges": -1.0, "DyadCov lag1": 0.0},
        "attribute_generator": {}},
      "memory_order": 1,
      "model": {"terms": [
        {"kind": "edges", "name": "Edges"},
        {"kind": "dyad_cov", "cov": "lag1"}
      ]},
      "fit": {"bootstrap": 4, "seed": 3}
    })");
    RunConfig cfg = RunConfig::from_file(path);
    CHECK_FALSE(has_errors(validate(cfg)));
    RunOverrides overrides;
    overrides.output_dir = (dir / "out").string();
    RunResult result = run(cfg, RunMode::Fit, overrides);
    CHECK(result.exit_code == 0);
    std::string fit_json = slurp(dir / "out" / "fit.json");
    CHECK(fit_json.find("DyadCov lag1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sparse mixing cells produce warnings from real inputs") {
    RunConfig cfg = RunConfig::from_file("configs/paper_model.json");
    auto diags = validate(cfg);
    bool sparse_warning = false;
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Warning &&
            d.message.find("observed tie") != std::string::npos)
            sparse_warning = true;
    CHECK(sparse_warning);
}

TEST_CASE("simulate-then-fit runs write recovery tables and are reproducible across workers") {
    fs::path dir = temp_dir();
    std::string config_path = write_config(dir, kSimulateFitConfig);
    RunConfig cfg = RunConfig::from_file(config_path);

    RunOverrides one;
    one.output_dir = (dir / "w1").string();
    one.workers = 1;
    RunResult r1 = run(cfg, RunMode::Report, one);
    REQUIRE(r1.exit_code == 0);

    RunOverrides two;
    two.output_dir = (dir / "w2").string();
    two.workers = 2;
    RunResult r2 = run(cfg, RunMode::Report, two);
    REQUIRE(r2.exit_code == 0);

    const std::vector<std::string> artifacts = {
        "simulated_edges.csv", "simulated_attributes.csv", "panel_summary.csv",
        "coefficients.csv",    "replicates.csv",           "fit.json",
        "recovery.csv",        "mixing.csv",               "probability.csv"};
    for (const auto& name : artifacts) {
        INFO(name);
        CHECK(slurp(dir / "w1" / name) == slurp(dir / "w2" / name));
    }

    // recovery table carries the configured truth
    std::string recovery = slurp(dir / "w1" / "recovery.csv");
    CHECK(recovery.find("Edges,-1.5,") != std::string::npos);
    CHECK(recovery.find("Reciprocity,0.8,") != std::string::npos);

    // seed override changes the artifacts
    RunOverrides reseeded;
    reseeded.output_dir = (dir / "w3").string();
    reseeded.seed = 999;
    RunResult r3 = run(cfg, RunMode::Report, reseeded);
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(dir / "w1" / "simulated_edges.csv") != slurp(dir / "w3" / "simulated_edges.csv"));

    fs::remove_all(dir);
}

TEST_CASE("failed runs remove their partial outputs") {
    fs::path dir = temp_dir();
    // the decile request fails at runtime: the generated attribute is
    // effectively constant (lo == hi), which deciles reject
    std::string path = write_config(dir, R"({
      "simulate": {"n": 12, "periods": 2, "seed": 5,
        "theta": {"Edges": -1.0},
        "attribute_generator": {"numeric": [{"name": "x", "lo": 0.5, "hi": 0.5}]}},
      "model": {"terms": [{"kind": "edges", "name": "Edges"}]},
      "fit": {"bootstrap": 5, "seed": 2},
      "analysis": {"deciles": [{"name": "d", "period": "1", "attr": "x"}]}
    })");
    RunConfig cfg = RunConfig::from_file(path);
    RunOverrides overrides;
    overrides.output_dir = (dir / "out").string();
    RunResult result = run(cfg, RunMode::Report, overrides);
    CHECK(result.exit_code == 1);
    CHECK(result.outputs.empty());
    bool mentions_decile = false;
    for (const auto& d : result.diagnostics)
        if (d.message.find("distinct") != std::string::npos) mentions_decile = true;
    CHECK(mentions_decile);
    // every partial artifact was removed
    if (fs::exists(dir / "out")) {
        int files = 0;
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir / "out")) ++files;
        CHECK(files == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("invalid configs exit with validation diagnostics and no artifacts") {
    fs::path dir = temp_dir();
    std::string path = write_config(dir, R"({
      "model": {"terms": [{"kind": "edges", "name": "Edges"}]}
    })");
    RunConfig cfg = RunConfig::from_file(path);
    RunOverrides overrides;
    overrides.output_dir = (dir / "out").string();
    RunResult result = run(cfg, RunMode::Report, overrides);
    CHECK(result.exit_code == 2);
    CHECK(result.outputs.empty());
    CHECK(has_errors(result.diagnostics));
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("manifests record digests, seeds and outputs") {
    fs::path dir = temp_dir();
    std::string config_path = write_config(dir, kSimulateFitConfig);
    RunConfig cfg = RunConfig::from_file(config_path);
    RunOverrides overrides;
    overrides.output_dir = (dir / "out").string();
    RunResult result = run(cfg, RunMode::Report, overrides);
    REQUIRE(result.exit_code == 0);

    std::string manifest = slurp(dir / "out" / "manifest.json");
    CHECK(manifest.find("\"config_digest\": \"fnv1a64:") != std::string::npos);
    CHECK(manifest.find("\"fit_seed\": 11") != std::string::npos);
    CHECK(manifest.find("\"simulate_seed\": 5") != std::string::npos);
    CHECK(manifest.find("coefficients.csv") != std::string::npos);
    CHECK(manifest.find("timings_ms") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("ingest mode summarizes the thresholded panel") {
    fs::path dir = temp_dir();
    RunConfig cfg = RunConfig::from_file("configs/mixing_108.json");
    RunOverrides overrides;
    overrides.output_dir = (dir / "out").string();
    RunResult result = run(cfg, RunMode::Ingest, overrides);
    REQUIRE(result.exit_code == 0);
    std::string summary = slurp(dir / "out" / "panel_summary.csv");
    CHECK(summary.find("period,nodes,ties,density") != std::string::npos);
    CHECK(summary.find("108,439,2250,") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "mixing.csv"));  // ingest stops before analysis
    fs::remove_all(dir);
}
