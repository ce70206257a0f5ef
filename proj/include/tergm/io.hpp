#pragma once

#include <string>
#include <vector>

#include "tergm/panel.hpp"

namespace tergm {

// Delimited-text interchange formats (comma-separated, UTF-8, header row
// required):
//   edges:           period_label,sender_id,receiver_id,weight
//   attributes:      period_label,node_id,attr_name,value
//   dyad covariates: period_label,sender_id,receiver_id,cov_name,value
// Attribute values parse according to the declared schema; the literal "NA"
// flags an explicitly missing value.

struct EdgeRow {
    std::string period, sender, receiver;
    long long weight = 0;
};

struct DyadCovRow {
    std::string period, sender, receiver, name;
    double value = 0.0;
};

std::vector<EdgeRow> read_edge_list(const std::string& path);
std::vector<DyadCovRow> read_dyad_covariates(const std::string& path);

// Parses attribute rows against the declared schemas (categorical values
// must belong to the declared level set).
AttributeTable read_attributes(const std::string& path,
                               const std::vector<AttributeSchema>& declarations);

struct IngestResult {
    PanelNetwork panel;  // weighted networks only; threshold separately
    std::vector<std::string> warnings;
};

// Assembles a weighted panel from parsed rows. The roster of each period is
// the union of node ids seen in that period's attribute and edge rows,
// sorted lexicographically. Repeated (sender, receiver) rows accumulate.
IngestResult assemble_panel(const std::vector<EdgeRow>& edges, AttributeTable attributes,
                            const std::vector<DyadCovRow>& dyad_covs, int memory_order);

// Writers emit the same formats the readers accept (binary networks write
// weight 1 per tie unless the weighted matrix is present).
void write_edge_list(const std::string& path, const PanelNetwork& panel);
void write_attributes(const std::string& path, const PanelNetwork& panel);

}  // namespace tergm
