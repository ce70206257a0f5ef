#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tergm/stats.hpp"
#include "tergm/util.hpp"

using namespace tergm;
using namespace tergm::testsupport;

namespace {

DirectedGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    DirectedGraph g = DirectedGraph::empty(node_ids(n));
    for (auto [i, j] : edges) g = g.with_edge(i, j, true);
    return g;
}

}  // namespace

TEST_CASE("reciprocity counts mutual pairs") {
    // edges {(1,2),(2,1),(1,3)} in 1-indexed notation -> one mutual pair
    DirectedGraph g = graph_from_edges(3, {{0, 1}, {1, 0}, {0, 2}});
    CHECK(global_statistic(ModelTerm::reciprocity(), g, {}) == 1.0);
}

TEST_CASE("gw in-degree evaluates the displayed exponential sum") {
    // edges {(1,2),(3,2)}: in-degrees (0, 2, 0); alpha = 0.5
    DirectedGraph g = graph_from_edges(3, {{0, 1}, {2, 1}});
    double expected = 2.0 + std::exp(-1.0);  // e^0 + e^{-0.5*2} + e^0 = 2.3678794411714423
    CHECK(global_statistic(ModelTerm::gw_in_degree(0.5), g, {}) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(2.3678794411714423).epsilon(1e-15));
}

TEST_CASE("gw in-degree of the empty graph is n") {
    for (int n : {2, 5, 9})
        CHECK(global_statistic(ModelTerm::gw_in_degree(0.5), DirectedGraph::empty(node_ids(n)),
                               {}) == doctest::Approx(n).epsilon(1e-15));
}

TEST_CASE("single shared partner contributes exactly one to gwesp") {
    // edges {(1,2),(1,3),(3,2)}: edge (1,2) has the single OTP partner 3,
    // so the statistic is e^phi * (1 - (1 - e^-phi)) = 1 for any phi
    DirectedGraph g = graph_from_edges(3, {{0, 1}, {0, 2}, {2, 1}});
    for (double phi : {0.0, 0.25, 0.5, 1.5})
        CHECK(global_statistic(ModelTerm::gwesp(phi), g, {}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gwesp at phi zero counts edges with at least one shared partner") {
    Rng rng(31);
    for (auto rule : {SharedPartnerRule::OutgoingTwoPath, SharedPartnerRule::IncomingTwoPath}) {
        for (int rep = 0; rep < 20; ++rep) {
            int n = 3 + rng.uniform_index(7);
            DirectedGraph g = random_graph(n, 0.4, rng);
            long long count = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j || !g.edge(i, j)) continue;
                    int sp = 0;
                    for (int k = 0; k < n; ++k) {
                        if (k == i || k == j) continue;
                        bool partner = rule == SharedPartnerRule::OutgoingTwoPath
                                           ? g.edge(i, k) && g.edge(k, j)
                                           : g.edge(j, k) && g.edge(k, i);
                        if (partner) ++sp;
                    }
                    if (sp >= 1) ++count;
                }
            CHECK(global_statistic(ModelTerm::gwesp(0.0, rule), g, {}) ==
                  doctest::Approx(static_cast<double>(count)).epsilon(1e-12));
        }
    }
}

TEST_CASE("reciprocity of a symmetric adjacency is half the edge count") {
    Rng rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 2 + rng.uniform_index(8);
        DirectedGraph base = random_graph(n, 0.4, rng);
        DirectedGraph sym = base;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (base.edge(i, j)) sym = sym.with_edge(j, i, true);
        CHECK(global_statistic(ModelTerm::reciprocity(), sym, {}) ==
              doctest::Approx(static_cast<double>(sym.edge_count()) / 2.0));
    }
}

TEST_CASE("edges change statistic is identically one") {
    Rng rng(41);
    DirectedGraph g = random_graph(6, 0.3, rng);
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    ChangeStatMatrix csm = change_statistics(model, g, {});
    CHECK(csm.dyads.size() == 30);
    for (std::size_t r = 0; r < csm.dyads.size(); ++r) CHECK(csm.at(r, 0) == 1.0);
}

TEST_CASE("reciprocity change statistic mirrors the reverse tie") {
    DirectedGraph with = graph_from_edges(3, {{0, 1}});
    CHECK(change_statistic(ModelTerm::reciprocity(), with, {}, 1, 0) == 1.0);
    DirectedGraph without = DirectedGraph::empty(node_ids(3));
    CHECK(change_statistic(ModelTerm::reciprocity(), without, {}, 1, 0) == 0.0);
}

TEST_CASE("node mix change statistic is the cell indicator") {
    Covariates covs;
    CategoricalColumn race;
    race.levels = {"white", "black", "latino"};
    race.value = {1, 1, 0};
    covs.categorical["race"] = race;
    DirectedGraph g = DirectedGraph::empty(node_ids(3));
    ModelTerm t = ModelTerm::node_mix("race", "black", "black");
    CHECK(change_statistic(t, g, covs, 0, 1) == 1.0);
    CHECK(change_statistic(t, g, covs, 0, 2) == 0.0);
    CHECK(change_statistic(t, g, covs, 2, 1) == 0.0);
}

TEST_CASE("local change statistics equal the two-evaluation oracle for every term") {
    Rng rng(43);
    ModelSpec model = term_zoo();
    for (int rep = 0; rep < 40; ++rep) {
        int n = 3 + rng.uniform_index(8);  // up to 10 nodes
        DirectedGraph g = random_graph(n, 0.1 + 0.6 * rng.uniform(), rng);
        Covariates covs = random_covariates(n, rng);
        std::vector<BoundTerm> bound = bind_model(model, covs, n);
        for (const auto& b : bound)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    double local = change_statistic(b, g.view(), i, j);
                    double brute = change_statistic_by_toggle(b, g.view(), i, j);
                    CHECK(std::fabs(local - brute) <= 1e-12);
                }
    }
}

TEST_CASE("global statistics are invariant under node relabeling") {
    Rng rng(47);
    ModelSpec model = term_zoo();
    for (int rep = 0; rep < 15; ++rep) {
        int n = 3 + rng.uniform_index(7);
        DirectedGraph g = random_graph(n, 0.4, rng);
        Covariates covs = random_covariates(n, rng);

        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int k = n - 1; k > 0; --k)
            std::swap(perm[static_cast<std::size_t>(k)],
                      perm[static_cast<std::size_t>(rng.uniform_index(k + 1))]);

        DirectedGraph pg = g.relabeled(perm);
        Covariates pcovs = covs;
        for (auto& [name, col] : pcovs.numeric)
            for (int k = 0; k < n; ++k)
                col[static_cast<std::size_t>(k)] =
                    covs.numeric[name][static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
        for (auto& [name, col] : pcovs.categorical)
            for (int k = 0; k < n; ++k)
                col.value[static_cast<std::size_t>(k)] =
                    covs.categorical[name]
                        .value[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
        for (auto& [name, mat] : pcovs.dyad)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    mat[static_cast<std::size_t>(i) * n + j] =
                        covs.dyad[name][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * n +
                                        perm[static_cast<std::size_t>(j)]];

        for (const auto& term : model.terms) {
            double a = global_statistic(term, g, covs);
            double b = global_statistic(term, pg, pcovs);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("node mix deltas over all cells partition the edge count") {
    Rng rng(53);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 3 + rng.uniform_index(7);
        DirectedGraph g = random_graph(n, 0.5, rng);
        Covariates covs = random_covariates(n, rng);
        ModelSpec model;
        for (const auto& s : covs.categorical["race"].levels)
            for (const auto& r : covs.categorical["race"].levels)
                model.terms.push_back(ModelTerm::node_mix("race", s, r));
        ChangeStatMatrix csm = change_statistics(model, g, covs);
        double total = 0;
        for (std::size_t row = 0; row < csm.dyads.size(); ++row)
            for (std::size_t c = 0; c < model.terms.size(); ++c)
                total += csm.at(row, c) * csm.y[row];
        CHECK(total == doctest::Approx(static_cast<double>(g.edge_count())));
    }
}

TEST_CASE("mixing term expansion follows receiver-major table order") {
    AttributeSchema race{"race", AttrType::Categorical, {"white", "black", "latino"}};
    auto terms = mixing_terms_from_attribute(race, {"white", "white"});
    REQUIRE(terms.size() == 8);
    std::vector<std::string> names;
    for (const auto& t : terms) names.push_back(t.name());
    CHECK(names == std::vector<std::string>{
                       "Black -> White", "Latino -> White", "White -> Black", "Black -> Black",
                       "Latino -> Black", "White -> Latino", "Black -> Latino",
                       "Latino -> Latino"});

    AttributeSchema gender{"gender", AttrType::Categorical, {"men", "women"}};
    auto gterms = mixing_terms_from_attribute(gender, {"men", "men"});
    REQUIRE(gterms.size() == 3);
    CHECK(gterms[0].name() == "Women -> Men");
    CHECK(gterms[1].name() == "Men -> Women");
    CHECK(gterms[2].name() == "Women -> Women");

    AttributeSchema solo{"solo", AttrType::Categorical, {"only"}};
    CHECK(mixing_terms_from_attribute(solo, {"only", "only"}).empty());

    CHECK_THROWS_WITH_AS(mixing_terms_from_attribute(race, {"white", "green"}),
                         doctest::Contains("not in the level set"), Error);
}

TEST_CASE("a model cannot reintroduce its excluded reference category") {
    AttributeSchema race{"race", AttrType::Categorical, {"white", "black", "latino"}};
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    for (auto& t : mixing_terms_from_attribute(race, {"white", "white"}))
        model.terms.push_back(std::move(t));
    model.reference_exclusions.push_back({"race", "white", "white"});
    model.validate();  // fine as expanded
    model.terms.push_back(ModelTerm::node_mix("race", "white", "white"));
    CHECK_THROWS_WITH_AS(model.validate(), doctest::Contains("reintroduces"), Error);
}

TEST_CASE("interaction multiplies per-dyad contributions") {
    Covariates covs;
    covs.numeric["x"] = {0.5, 2.0, 3.0};
    covs.numeric["z"] = {1.0, 4.0, 0.25};
    DirectedGraph g = graph_from_edges(3, {{0, 1}});
    ModelTerm t = ModelTerm::interaction(ModelTerm::sender_attr("x"), ModelTerm::receiver_attr("z"));
    CHECK(change_statistic(t, g, covs, 0, 1) == 0.5 * 4.0);
    CHECK(change_statistic(t, g, covs, 2, 0) == 3.0 * 1.0);
    CHECK(global_statistic(t, g, covs) == doctest::Approx(0.5 * 4.0));
}

TEST_CASE("binding errors name the offending term") {
    DirectedGraph g = DirectedGraph::empty(node_ids(3));
    Covariates covs = {};
    CHECK_THROWS_WITH_AS(global_statistic(ModelTerm::sender_attr("ghost"), g, covs),
                         doctest::Contains("Sender ghost"), Error);
    Covariates covs2;
    CategoricalColumn col;
    col.levels = {"a", "b"};
    col.value = {0, 1, 0};
    covs2.categorical["grp"] = col;
    CHECK_THROWS_WITH_AS(global_statistic(ModelTerm::node_mix("grp", "a", "zz"), g, covs2),
                         doctest::Contains("not a level"), Error);
    ModelTerm pc = ModelTerm::period_cov({1.0}, "P");
    Covariates covs3;
    covs3.period_index = 3;
    CHECK_THROWS_WITH_AS(global_statistic(pc, g, covs3), doctest::Contains("period index"),
                         Error);
}

TEST_CASE("dyads touching nodes with missing attributes are dropped") {
    Covariates covs;
    covs.numeric["x"] = {0.5, std::nan(""), 1.5};
    DirectedGraph g = graph_from_edges(3, {{0, 1}, {0, 2}});
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    model.terms.push_back(ModelTerm::sender_attr("x"));
    ChangeStatMatrix csm = change_statistics(model, g, covs);
    // node 1 cannot send: dyads (1,0), (1,2) dropped; receiving is unaffected
    CHECK(csm.dyads.size() == 4);
    CHECK(csm.dropped_dyads == 2);
    for (auto [i, j] : csm.dyads) CHECK(i != 1);

    ModelSpec both;
    both.terms.push_back(ModelTerm::absdiff("x"));
    ChangeStatMatrix csm2 = change_statistics(both, g, covs);
    CHECK(csm2.dyads.size() == 2);  // node 1 can neither send nor receive
    CHECK(csm2.dropped_dyads == 4);
}

TEST_CASE("change statistic rows are identical for any worker count") {
    Rng rng(59);
    DirectedGraph g = random_graph(9, 0.4, rng);
    Covariates covs = random_covariates(9, rng);
    ModelSpec model = term_zoo();
    ChangeStatMatrix a = change_statistics(model, g, covs, 1);
    ChangeStatMatrix b = change_statistics(model, g, covs, 4);
    CHECK(a.dyads == b.dyads);
    CHECK(a.y == b.y);
    REQUIRE(a.delta.size() == b.delta.size());
    for (std::size_t k = 0; k < a.delta.size(); ++k) CHECK(a.delta[k] == b.delta[k]);
}
