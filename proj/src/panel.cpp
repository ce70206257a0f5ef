#include "tergm/panel.hpp"

#include <algorithm>

#include "tergm/util.hpp"

namespace tergm {

const std::vector<std::string>& PanelPeriod::node_ids() const {
    if (binary) return binary->node_ids();
    if (weighted) return weighted->node_ids();
    throw Error("period '" + label + "' holds no network");
}

PanelNetwork PanelNetwork::build(std::vector<PanelPeriod> periods, AttributeTable attributes,
                                 DyadCovariates dyad_covariates, int memory_order) {
    if (periods.empty()) throw Error("panel needs at least one period");
    if (memory_order < 0) throw Error("memory order must be nonnegative");
    if (memory_order >= static_cast<int>(periods.size()))
        throw Error("memory order " + std::to_string(memory_order) +
                    " requires more than " + std::to_string(periods.size()) + " period(s)");

    for (auto& p : periods) {
        if (!p.weighted && !p.binary) throw Error("period '" + p.label + "' holds no network");
        p.label_value = parse_int(p.label);
        const auto& ids = p.node_ids();
        if (p.weighted && p.binary && p.weighted->node_ids() != p.binary->node_ids())
            throw Error("period '" + p.label + "': weighted and binary rosters differ");
        std::vector<std::string> sorted_ids(ids);
        std::sort(sorted_ids.begin(), sorted_ids.end());
        auto dup = std::adjacent_find(sorted_ids.begin(), sorted_ids.end());
        if (dup != sorted_ids.end())
            throw Error("period '" + p.label + "': duplicate node id '" + *dup + "' in roster");
    }
    for (std::size_t t = 1; t < periods.size(); ++t) {
        if (periods[t - 1].label_value >= periods[t].label_value)
            throw Error("period labels must be strictly increasing: '" + periods[t - 1].label +
                        "' then '" + periods[t].label + "'");
    }
    for (const auto& [name, mats] : dyad_covariates) {
        if (mats.size() != periods.size())
            throw Error("dyad covariate '" + name + "' covers " + std::to_string(mats.size()) +
                        " period(s), panel has " + std::to_string(periods.size()));
        for (std::size_t t = 0; t < mats.size(); ++t) {
            auto n = static_cast<std::size_t>(periods[t].size());
            if (mats[t].size() != n * n)
                throw Error("dyad covariate '" + name + "' has wrong dimension in period '" +
                            periods[t].label + "'");
        }
    }

    PanelNetwork panel;
    panel.periods_ = std::move(periods);
    panel.attrs_ = std::move(attributes);
    panel.dyad_covs_ = std::move(dyad_covariates);
    panel.memory_order_ = memory_order;
    return panel;
}

PanelNetwork PanelNetwork::thresholded(long long k) const {
    PanelNetwork out = *this;
    for (auto& p : out.periods_) {
        if (p.weighted) p.binary = threshold(*p.weighted, k);
    }
    return out;
}

int PanelNetwork::period_index(const std::string& label) const {
    for (std::size_t t = 0; t < periods_.size(); ++t)
        if (periods_[t].label == label) return static_cast<int>(t);
    return -1;
}

std::vector<int> PanelNetwork::modeled_periods() const {
    std::vector<int> out;
    for (int t = memory_order_; t < period_count(); ++t) out.push_back(t);
    return out;
}

bool panel_structurally_equal(const PanelNetwork& a, const PanelNetwork& b) {
    if (a.period_count() != b.period_count()) return false;
    if (a.memory_order() != b.memory_order()) return false;
    for (int t = 0; t < a.period_count(); ++t) {
        const auto& pa = a.period(t);
        const auto& pb = b.period(t);
        if (pa.label != pb.label) return false;
        if (pa.node_ids() != pb.node_ids()) return false;
        if (!pa.binary || !pb.binary) return false;
        if (!(*pa.binary == *pb.binary)) return false;
        // attribute values for every roster node and declared attribute
        for (const auto& schema : a.attributes().schemas()) {
            if (!b.attributes().declared(schema.name)) return false;
            for (const auto& id : pa.node_ids()) {
                if (schema.type == AttrType::Categorical) {
                    if (a.attributes().level_of(pa.label, id, schema.name) !=
                        b.attributes().level_of(pb.label, id, schema.name))
                        return false;
                } else {
                    if (a.attributes().numeric(pa.label, id, schema.name) !=
                        b.attributes().numeric(pb.label, id, schema.name))
                        return false;
                }
            }
        }
    }
    return true;
}

}  // namespace tergm
