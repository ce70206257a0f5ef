#pragma once

// Shared helpers for the unit and acceptance suites: random graphs, random
// covariate bundles, and one term of every implemented kind.

#include <string>
#include <vector>

#include "tergm/graph.hpp"
#include "tergm/rng.hpp"
#include "tergm/stats.hpp"
#include "tergm/terms.hpp"

namespace tergm::testsupport {

inline std::vector<std::string> node_ids(int n) {
    std::vector<std::string> out;
    for (int k = 0; k < n; ++k) out.push_back("v" + std::to_string(k));
    return out;
}

inline DirectedGraph random_graph(int n, double density, Rng& rng) {
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && rng.uniform() < density)
                adj[static_cast<std::size_t>(i) * n + j] = 1;
    return DirectedGraph(node_ids(n), std::move(adj));
}

// race-like categorical, two numeric columns in [0, 1], one dyad covariate,
// three period-cov values
inline Covariates random_covariates(int n, Rng& rng) {
    Covariates covs;
    CategoricalColumn race;
    race.levels = {"white", "black", "latino"};
    for (int k = 0; k < n; ++k) race.value.push_back(rng.uniform_index(3));
    covs.categorical["race"] = std::move(race);
    std::vector<double> x(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.uniform();
    for (auto& v : z) v = rng.uniform();
    covs.numeric["x"] = std::move(x);
    covs.numeric["z"] = std::move(z);
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) d[static_cast<std::size_t>(i) * n + j] = rng.uniform();
    covs.dyad["w"] = std::move(d);
    covs.period_index = 1;
    return covs;
}

// every implemented term kind, including interactions over dyad-local and
// structural operands
inline ModelSpec term_zoo() {
    ModelSpec model;
    model.terms.push_back(ModelTerm::edges());
    model.terms.push_back(ModelTerm::reciprocity());
    model.terms.push_back(ModelTerm::gw_out_degree(0.5));
    model.terms.push_back(ModelTerm::gw_in_degree(0.7));
    {
        ModelTerm t = ModelTerm::gwesp(0.5, SharedPartnerRule::OutgoingTwoPath);
        t.label = "GWESP otp";
        model.terms.push_back(t);
    }
    {
        ModelTerm t = ModelTerm::gwesp(0.3, SharedPartnerRule::IncomingTwoPath);
        t.label = "GWESP itp";
        model.terms.push_back(t);
    }
    model.terms.push_back(ModelTerm::sender_attr("x"));
    model.terms.push_back(ModelTerm::receiver_attr("z"));
    model.terms.push_back(ModelTerm::match("race"));
    model.terms.push_back(ModelTerm::absdiff("x"));
    model.terms.push_back(ModelTerm::node_mix("race", "black", "black"));
    model.terms.push_back(ModelTerm::dyad_cov("w"));
    model.terms.push_back(ModelTerm::period_cov({0.3, 0.7, 1.1}, "Period"));
    model.terms.push_back(ModelTerm::interaction(ModelTerm::sender_attr("x"),
                                                 ModelTerm::receiver_attr("z"), "x*z"));
    model.terms.push_back(ModelTerm::interaction(ModelTerm::match("race"),
                                                 ModelTerm::period_cov({0.3, 0.7, 1.1}, "P2"),
                                                 "match*period"));
    model.terms.push_back(ModelTerm::interaction(ModelTerm::reciprocity(),
                                                 ModelTerm::sender_attr("x"), "recip*x"));
    return model;
}

}  // namespace tergm::testsupport
