#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tergm/attributes.hpp"
#include "tergm/graph.hpp"

namespace tergm {

// One observation period. Holds the weighted network when the input was
// weighted, and the binary network once thresholded (or directly when the
// input was already binary). The roster is the graph's node id list.
struct PanelPeriod {
    std::string label;
    long long label_value = 0;  // labels must parse as integers and increase
    std::optional<WeightedGraph> weighted;
    std::optional<DirectedGraph> binary;

    const std::vector<std::string>& node_ids() const;
    int size() const { return static_cast<int>(node_ids().size()); }
};

// name -> per-period dense matrices (size n_t * n_t, row-major, aligned to
// that period's roster order)
using DyadCovariates = std::map<std::string, std::vector<std::vector<double>>>;

// Ordered sequence of observed networks with per-period rosters, node
// attributes, dyad covariates, and the memory order K. Immutable after
// construction; safe to share across workers.
class PanelNetwork {
public:
    PanelNetwork() = default;

    // align_panel: validates label ordering, roster/graph consistency,
    // duplicate ids, dyad covariate dimensions, and memory order.
    static PanelNetwork build(std::vector<PanelPeriod> periods, AttributeTable attributes,
                              DyadCovariates dyad_covariates, int memory_order);

    // Applies threshold(k) to every weighted period, keeping the weights.
    // Periods that are already binary are left alone.
    PanelNetwork thresholded(long long k) const;

    int period_count() const { return static_cast<int>(periods_.size()); }
    const PanelPeriod& period(int t) const { return periods_.at(static_cast<std::size_t>(t)); }
    int period_index(const std::string& label) const;  // -1 when absent
    const AttributeTable& attributes() const { return attrs_; }
    const DyadCovariates& dyad_covariates() const { return dyad_covs_; }
    int memory_order() const { return memory_order_; }

    // periods that contribute rows to estimation: t = K .. T-1
    std::vector<int> modeled_periods() const;

private:
    std::vector<PanelPeriod> periods_;
    AttributeTable attrs_;
    DyadCovariates dyad_covs_;
    int memory_order_ = 0;
};

// Structural equality used by the round-trip tests: labels, rosters, binary
// adjacency, and attribute values must match (weighted matrices optional).
bool panel_structurally_equal(const PanelNetwork& a, const PanelNetwork& b);

}  // namespace tergm
