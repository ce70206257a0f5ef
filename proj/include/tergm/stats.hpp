#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tergm/graph.hpp"
#include "tergm/terms.hpp"

namespace tergm {

struct CategoricalColumn {
    std::vector<std::string> levels;
    std::vector<int> value;  // level index per node, -1 = missing
};

// Everything a period supplies to statistic evaluation besides the graph:
// node attribute columns aligned to the roster order, dense dyad covariate
// matrices, and the period's position for PeriodCov terms.
struct Covariates {
    std::map<std::string, std::vector<double>> numeric;  // NaN = missing
    std::map<std::string, CategoricalColumn> categorical;
    std::map<std::string, std::vector<double>> dyad;  // n*n row-major
    int period_index = 0;
};

// A model term resolved against one period's covariates: raw pointers into
// the Covariates so the per-dyad loops do no map lookups. Binding validates
// the term (unknown attribute, wrong type, undeclared level, short column)
// and throws naming the term.
struct BoundTerm {
    const ModelTerm* term = nullptr;
    TermKind kind = TermKind::Edges;
    double decay = 0.5;
    double e_phi = 0.0, one_minus_em_phi = 0.0;  // gwesp precomputation
    SharedPartnerRule sp_rule = SharedPartnerRule::OutgoingTwoPath;
    const double* num = nullptr;           // sender/receiver/absdiff/match numeric column
    const int* cat = nullptr;              // match/node_mix categorical column
    int lvl_sender = -1, lvl_receiver = -1;
    const double* dyad = nullptr;
    double period_value = 0.0;
    std::vector<BoundTerm> operands;

    bool dyad_local() const;  // contribution depends only on (i, j), not the graph
};

BoundTerm bind_term(const ModelTerm& term, const Covariates& covs, int n);
std::vector<BoundTerm> bind_model(const ModelSpec& model, const Covariates& covs, int n);

// h(N): the term's global statistic on one network.
double global_statistic(const BoundTerm& term, AdjView g);
double global_statistic(const ModelTerm& term, const DirectedGraph& graph,
                        const Covariates& covs);

// delta_ij: h(N with i->j set) - h(N with i->j cleared), computed by local
// update. Independent of the current state of the (i, j) cell.
double change_statistic(const BoundTerm& term, AdjView g, int i, int j);
double change_statistic(const ModelTerm& term, const DirectedGraph& graph, const Covariates& covs,
                        int i, int j);

// The two-evaluation definition, kept as the fallback path for terms without
// a local rule (interactions over structural operands) and as the oracle the
// local path is tested against.
double change_statistic_by_toggle(const BoundTerm& term, AdjView g, int i, int j);

// Per-dyad change statistics for a whole model over one period.
struct ChangeStatMatrix {
    std::vector<std::string> term_names;
    std::vector<std::pair<int, int>> dyads;  // ascending (i, j), i != j
    std::vector<double> delta;               // dyads x terms, row-major
    std::vector<std::uint8_t> y;             // observed tie per dyad
    long long dropped_dyads = 0;             // dyads dropped for missing attributes
    std::string period_label;

    double at(std::size_t row, std::size_t col) const {
        return delta[row * term_names.size() + col];
    }
};

// Rows are emitted in ascending dyad order regardless of worker count.
ChangeStatMatrix change_statistics(const ModelSpec& model, const DirectedGraph& graph,
                                   const Covariates& covs, int workers = 1);

// Which nodes can appear as sender / receiver given the attributes the model
// needs. Dyads touching a node that is missing a required attribute are
// dropped from estimation (never from the network itself).
struct UsableNodes {
    std::vector<std::uint8_t> can_send, can_receive;
};
UsableNodes usable_nodes(const ModelSpec& model, const Covariates& covs, int n);

}  // namespace tergm
