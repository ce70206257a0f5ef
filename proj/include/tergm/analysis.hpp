#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "tergm/panel.hpp"
#include "tergm/stats.hpp"

namespace tergm {

// Opportunity-structure baseline: share_g = |group g| / |roster|. Every
// roster node must carry the attribute (nodes are listed otherwise).
std::vector<double> baseline_shares(const CategoricalColumn& attr,
                                    const std::vector<std::string>& node_ids);

struct MixingReport {
    std::string attr;
    std::vector<std::string> levels;
    std::vector<long long> group_sizes;
    std::vector<double> baseline;  // group-share-of-roster definition
    std::vector<std::vector<long long>> tie_counts;  // sender group x receiver group
    std::vector<long long> out_ties;                 // per sender group
    std::vector<std::vector<double>> observed;       // row shares; NaN when a group sends no ties
    std::vector<std::vector<double>> baseline_used;  // per cell (differs per row when
                                                     // self-exclusion is on)
    std::vector<std::vector<double>> preferential;   // observed - baseline_used
    bool self_exclusion = false;
};

// Observed group-to-group tie shares against the baseline. Nodes with ties
// must carry the attribute; violations are rejected listing the nodes. The
// optional self-exclusion variant removes the sender's own seat from the
// opportunity pool: baseline(g -> h) = (|h| - [g == h]) / (n - 1).
MixingReport mixing_matrix(const DirectedGraph& graph, const CategoricalColumn& attr,
                           const std::string& attr_name, bool self_exclusion = false);

// Declarative dyad filter on sender/receiver attributes: categorical
// equality and closed numeric ranges. Missing values never match.
struct SideSelector {
    std::vector<std::pair<std::string, std::string>> equals;           // (attr, level)
    std::vector<std::tuple<std::string, double, double>> ranges;       // (attr, lo, hi)
    bool empty() const { return equals.empty() && ranges.empty(); }
};

struct DyadSelector {
    SideSelector sender, receiver;
    std::string describe() const;
};

struct ProbabilitySummary {
    std::string selector;
    std::string period;  // period label, or "all" when pooled
    long long matches = 0;
    int sample_size = 0;
    double median = 0.0, q25 = 0.0, q75 = 0.0;
    std::uint64_t seed = 0;
};

// Samples m dyads uniformly from those matching the selector in the given
// period (period = -1 pools every modeled period), computes each dyad's tie
// probability logistic(theta . delta) against the observed network, and
// summarizes. m <= 0 means exhaustive; m larger than the number of matches
// samples with replacement. Deterministic given the seed.
ProbabilitySummary dyad_probability_sample(const Eigen::VectorXd& theta, const ModelSpec& model,
                                           const PanelNetwork& panel, int period,
                                           const DyadSelector& selector, int m,
                                           std::uint64_t seed);

struct DecileBand {
    int decile = 0;          // 0..9
    double lower = 0.0, upper = 0.0;
    ProbabilitySummary summary;
};

struct DecileCurve {
    std::string attr;
    std::vector<double> boundaries;  // 11 edges
    std::vector<DecileBand> bands;
};

// Partitions senders into deciles of a numeric attribute (empirical
// quantile boundaries; a value equal to a boundary falls in the lower
// decile) and summarizes tie probabilities to receivers matching the
// selector within each decile. Needs at least 10 distinct attribute values.
DecileCurve decile_curve(const Eigen::VectorXd& theta, const ModelSpec& model,
                         const PanelNetwork& panel, int period, const std::string& sender_attr,
                         const SideSelector& receiver, int m_per_decile, std::uint64_t seed);

}  // namespace tergm
