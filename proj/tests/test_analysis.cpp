#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "tergm/analysis.hpp"
#include "tergm/estimation.hpp"
#include "tergm/simulation.hpp"
#include "tergm/util.hpp"

using namespace tergm;
using namespace tergm::testsupport;

namespace {

double round2(double pct) { return std::round(pct * 100.0) / 100.0; }

CategoricalColumn column(std::vector<std::string> levels, std::vector<int> value) {
    CategoricalColumn c;
    c.levels = std::move(levels);
    c.value = std::move(value);
    return c;
}

CategoricalColumn grouped(const std::vector<std::string>& levels,
                          const std::vector<long long>& sizes) {
    CategoricalColumn c;
    c.levels = levels;
    for (std::size_t g = 0; g < sizes.size(); ++g)
        c.value.insert(c.value.end(), static_cast<std::size_t>(sizes[g]), static_cast<int>(g));
    return c;
}

std::vector<std::string> roster(int n) { return node_ids(n); }

PanelNetwork one_period_panel(DirectedGraph g, AttributeTable attrs) {
    std::vector<PanelPeriod> ps(1);
    ps[0].label = "108";
    ps[0].binary = std::move(g);
    return PanelNetwork::build(std::move(ps), std::move(attrs), {}, 0);
}

}  // namespace

TEST_CASE("house group counts give the published baseline shares") {
    CategoricalColumn race = grouped({"white", "black", "latino"}, {377, 38, 24});
    auto shares = baseline_shares(race, roster(439));
    CHECK(round2(100 * shares[0]) == 85.88);
    CHECK(round2(100 * shares[1]) == 8.66);
    CHECK(round2(100 * shares[2]) == 5.47);

    CategoricalColumn gender = grouped({"men", "women"}, {379, 60});
    auto gshares = baseline_shares(gender, roster(439));
    CHECK(round2(100 * gshares[0]) == 86.33);
    CHECK(round2(100 * gshares[1]) == 13.67);
}

TEST_CASE("baseline shares handle degenerate rosters") {
    CategoricalColumn solo = grouped({"only"}, {12});
    CHECK(baseline_shares(solo, roster(12))[0] == 1.0);

    CategoricalColumn empty;
    empty.levels = {"a"};
    CHECK_THROWS_WITH_AS(baseline_shares(empty, {}), doctest::Contains("empty roster"), Error);

    CategoricalColumn missing = column({"a", "b"}, {0, -1, 1});
    CHECK_THROWS_WITH_AS(baseline_shares(missing, roster(3)), doctest::Contains("v1"), Error);
}

TEST_CASE("mixing matrix rows are out-tie shares that sum to one") {
    Rng rng(109);
    DirectedGraph g = random_graph(12, 0.4, rng);
    CategoricalColumn attr = grouped({"a", "b", "c"}, {6, 4, 2});
    MixingReport report = mixing_matrix(g, attr, "grp");
    for (std::size_t r = 0; r < 3; ++r) {
        if (report.out_ties[r] == 0) continue;
        double total = 0.0;
        for (std::size_t c = 0; c < 3; ++c) total += report.observed[r][c];
        CHECK(std::fabs(total - 1.0) <= 1e-12);
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(report.preferential[r][c] ==
                  doctest::Approx(report.observed[r][c] - report.baseline[c]).epsilon(1e-14));
    }
    double baseline_total = 0.0;
    for (double b : report.baseline) baseline_total += b;
    CHECK(std::fabs(baseline_total - 1.0) <= 1e-12);
}

TEST_CASE("a group sending only within itself has a unit share row") {
    DirectedGraph g = DirectedGraph::empty(roster(5))
                          .with_edge(0, 1, true)
                          .with_edge(1, 0, true)
                          .with_edge(3, 2, true);
    CategoricalColumn attr = column({"in", "out"}, {0, 0, 0, 1, 1});
    MixingReport report = mixing_matrix(g, attr, "grp");
    CHECK(report.observed[0][0] == 1.0);
    CHECK(report.observed[0][1] == 0.0);
    CHECK(report.tie_counts[1][0] == 1);
}

TEST_CASE("mixing rejects tied nodes with missing attributes, listing them") {
    DirectedGraph g = DirectedGraph::empty(roster(4)).with_edge(0, 1, true);
    CategoricalColumn attr = column({"a", "b"}, {0, -1, -1, 0});
    // v1 has a tie and no attribute; v2 is missing but isolated, so allowed
    CHECK_THROWS_WITH_AS(mixing_matrix(g, attr, "grp"), doctest::Contains("v1"), Error);
    try {
        mixing_matrix(g, attr, "grp");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("v2") == std::string::npos);
    }
}

TEST_CASE("mixing is invariant under node relabeling") {
    Rng rng(113);
    DirectedGraph g = random_graph(9, 0.5, rng);
    CategoricalColumn attr = grouped({"a", "b"}, {5, 4});
    MixingReport base = mixing_matrix(g, attr, "grp");

    std::vector<int> perm = {8, 2, 5, 0, 7, 1, 4, 6, 3};
    DirectedGraph pg = g.relabeled(perm);
    CategoricalColumn pattr = attr;
    for (int k = 0; k < 9; ++k)
        pattr.value[static_cast<std::size_t>(k)] =
            attr.value[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    MixingReport permuted = mixing_matrix(pg, pattr, "grp");
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(base.out_ties[r] == permuted.out_ties[r]);
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(base.tie_counts[r][c] == permuted.tie_counts[r][c]);
    }
}

TEST_CASE("self-exclusion baseline removes the sender's own seat") {
    DirectedGraph g = DirectedGraph::empty(roster(4)).with_edge(0, 1, true);
    CategoricalColumn attr = column({"a", "b"}, {0, 0, 1, 1});
    MixingReport report = mixing_matrix(g, attr, "grp", true);
    CHECK(report.self_exclusion);
    CHECK(report.baseline_used[0][0] == doctest::Approx(1.0 / 3.0));
    CHECK(report.baseline_used[0][1] == doctest::Approx(2.0 / 3.0));
    CHECK(report.baseline[0] == doctest::Approx(0.5));  // default definition kept alongside
}

TEST_CASE("attribute-blind graphs show no preferential mixing") {
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta(1);
    theta << -1.0;
    CategoricalColumn attr = grouped({"a", "b"}, {15, 15});

    // the self-exclusion baseline makes the expected index exactly zero
    // (a sender's opportunity pool is the other n-1 nodes, not n)
    const int reps = 20;
    std::vector<std::vector<double>> index(4);  // per cell, per replicate
    for (int r = 0; r < reps; ++r) {
        GibbsOptions opts;
        opts.burn_in = 60;
        opts.seed = 1000 + static_cast<std::uint64_t>(r);
        auto draws = gibbs_sample(30, model, theta, {}, opts);
        MixingReport report = mixing_matrix(draws[0], attr, "grp", true);
        for (std::size_t g = 0; g < 2; ++g)
            for (std::size_t h = 0; h < 2; ++h)
                index[g * 2 + h].push_back(report.preferential[g][h]);
    }
    for (const auto& cell : index) {
        double mean = 0.0, var = 0.0;
        for (double v : cell) mean += v;
        mean /= reps;
        for (double v : cell) var += (v - mean) * (v - mean);
        var /= (reps - 1);
        double se = std::sqrt(var / reps);
        CHECK(std::fabs(mean) <= 3 * se);
    }
}

TEST_CASE("exhaustive dyad sampling equals direct computation") {
    Rng rng(127);
    DirectedGraph g = random_graph(10, 0.35, rng);
    AttributeTable attrs;
    attrs.declare({"race", AttrType::Categorical, {"white", "black"}});
    for (int k = 0; k < 10; ++k)
        attrs.set_level("108", "v" + std::to_string(k), "race", k < 7 ? "white" : "black");
    PanelNetwork panel = one_period_panel(g, std::move(attrs));

    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    model.terms.push_back(ModelTerm::reciprocity());
    model.terms.push_back(ModelTerm::node_mix("race", "black", "black"));
    Eigen::VectorXd theta(3);
    theta << -0.8, 0.6, 0.9;

    DyadSelector sel;
    sel.sender.equals.emplace_back("race", "black");
    sel.receiver.equals.emplace_back("race", "black");
    ProbabilitySummary summary = dyad_probability_sample(theta, model, panel, 0, sel, 0, 5);
    CHECK(summary.matches == 6);  // 3 black nodes -> 6 ordered dyads
    CHECK(summary.sample_size == 6);

    // direct oracle over the same dyads
    Covariates covs = covariates_for_period(panel, 0);
    std::vector<double> probs;
    for (int i = 7; i < 10; ++i)
        for (int j = 7; j < 10; ++j) {
            if (i == j) continue;
            double logit = 0.0;
            for (int c = 0; c < 3; ++c)
                logit += theta(c) * change_statistic(model.terms[static_cast<std::size_t>(c)],
                                                     *panel.period(0).binary, covs, i, j);
            probs.push_back(inverse_logit(logit));
        }
    std::sort(probs.begin(), probs.end());
    CHECK(summary.median == quantile_sorted(probs, 0.5));
    CHECK(summary.q25 == quantile_sorted(probs, 0.25));
    CHECK(summary.q75 == quantile_sorted(probs, 0.75));
}

TEST_CASE("zero coefficients make every sampled probability one half") {
    Rng rng(131);
    DirectedGraph g = random_graph(8, 0.3, rng);
    PanelNetwork panel = one_period_panel(g, {});
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    model.terms.push_back(ModelTerm::gwesp(0.5));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(2);
    ProbabilitySummary summary = dyad_probability_sample(theta, model, panel, 0, {}, 0, 3);
    CHECK(summary.median == 0.5);
    CHECK(summary.q25 == 0.5);
    CHECK(summary.q75 == 0.5);
}

TEST_CASE("sampling modes: subsample, oversample, determinism, empty selector") {
    Rng rng(137);
    DirectedGraph g = random_graph(12, 0.4, rng);
    PanelNetwork panel = one_period_panel(g, {});
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta(1);
    theta << -0.3;

    ProbabilitySummary sub = dyad_probability_sample(theta, model, panel, 0, {}, 40, 9);
    CHECK(sub.matches == 132);
    CHECK(sub.sample_size == 40);
    ProbabilitySummary sub2 = dyad_probability_sample(theta, model, panel, 0, {}, 40, 9);
    CHECK(sub.median == sub2.median);

    ProbabilitySummary over = dyad_probability_sample(theta, model, panel, 0, {}, 200, 9);
    CHECK(over.sample_size == 200);  // with replacement beyond 132 matches

    DyadSelector none;
    none.sender.ranges.emplace_back("nope", 0.0, 1.0);
    CHECK_THROWS_AS(dyad_probability_sample(theta, model, panel, 0, none, 0, 9), Error);

    DyadSelector impossible;
    impossible.sender.equals.emplace_back("race", "white");
    AttributeTable attrs;
    attrs.declare({"race", AttrType::Categorical, {"white", "black"}});
    for (int k = 0; k < 12; ++k)
        attrs.set_level("108", "v" + std::to_string(k), "race", "black");
    PanelNetwork panel2 = one_period_panel(g, std::move(attrs));
    CHECK_THROWS_WITH_AS(dyad_probability_sample(theta, model, panel2, 0, impossible, 0, 9),
                         doctest::Contains("matches no dyads"), Error);
}

TEST_CASE("pooled sampling spans every modeled period") {
    Rng rng(139);
    std::vector<PanelPeriod> ps;
    for (int t = 0; t < 3; ++t) {
        PanelPeriod p;
        p.label = std::to_string(100 + t);
        p.binary = random_graph(6, 0.3, rng);
        ps.push_back(std::move(p));
    }
    PanelNetwork panel = PanelNetwork::build(std::move(ps), {}, {}, 0);
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta(1);
    theta << 0.2;
    ProbabilitySummary pooled = dyad_probability_sample(theta, model, panel, -1, {}, 0, 2);
    CHECK(pooled.period == "all");
    CHECK(pooled.matches == 3 * 30);
}

TEST_CASE("decile curves partition senders by attribute quantiles") {
    Rng rng(149);
    DirectedGraph g = random_graph(30, 0.3, rng);
    AttributeTable attrs;
    attrs.declare({"pct", AttrType::Numeric, {}});
    for (int k = 0; k < 30; ++k)
        attrs.set_numeric("108", node_ids(30)[static_cast<std::size_t>(k)], "pct", k + 1.0);
    PanelNetwork panel = one_period_panel(g, std::move(attrs));
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(1);

    DecileCurve curve = decile_curve(theta, model, panel, 0, "pct", {}, 0, 11);
    REQUIRE(curve.bands.size() == 10);
    CHECK(curve.boundaries.front() == 1.0);
    CHECK(curve.boundaries.back() == 30.0);
    for (const auto& band : curve.bands) {
        CHECK(band.summary.matches == 3 * 29);  // three senders per decile
        CHECK(band.summary.median == 0.5);      // theta = 0
        CHECK(band.lower < band.upper);
    }
}

TEST_CASE("decile curves reject attributes without ten distinct values") {
    Rng rng(151);
    DirectedGraph g = random_graph(12, 0.3, rng);
    AttributeTable attrs;
    attrs.declare({"pct", AttrType::Numeric, {}});
    for (int k = 0; k < 12; ++k)
        attrs.set_numeric("108", node_ids(12)[static_cast<std::size_t>(k)], "pct",
                          static_cast<double>(k % 4));
    AttributeTable constant;
    constant.declare({"pct", AttrType::Numeric, {}});
    for (int k = 0; k < 12; ++k)
        constant.set_numeric("108", node_ids(12)[static_cast<std::size_t>(k)], "pct", 7.0);

    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_WITH_AS(
        decile_curve(theta, model, one_period_panel(g, std::move(attrs)), 0, "pct", {}, 0, 1),
        doctest::Contains("coarser quantiles"), Error);
    CHECK_THROWS_WITH_AS(
        decile_curve(theta, model, one_period_panel(g, std::move(constant)), 0, "pct", {}, 0, 1),
        doctest::Contains("distinct"), Error);
}

TEST_CASE("boundary ties fall into the lower decile") {
    // 20 sender values 1,1,2,2,...,10,10: every boundary is hit exactly
    Rng rng(157);
    DirectedGraph g = random_graph(20, 0.3, rng);
    AttributeTable attrs;
    attrs.declare({"pct", AttrType::Numeric, {}});
    for (int k = 0; k < 20; ++k)
        attrs.set_numeric("108", node_ids(20)[static_cast<std::size_t>(k)], "pct",
                          static_cast<double>(k / 2 + 1));
    PanelNetwork panel = one_period_panel(g, std::move(attrs));
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(1);
    DecileCurve curve = decile_curve(theta, model, panel, 0, "pct", {}, 0, 3);
    // each decile should hold exactly one value pair (2 senders x 19 receivers)
    for (const auto& band : curve.bands) CHECK(band.summary.matches == 2 * 19);
}
