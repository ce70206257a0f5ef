#include "tergm/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "tergm/util.hpp"

namespace tergm {

namespace {

std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty file (header row required)");
    // strip a UTF-8 BOM if present
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != expected_header)
        throw Error(path + ": expected header '" + expected_header + "', found '" + trim(line) +
                    "'");
    auto n_cols = split(expected_header, ',').size();
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != n_cols)
            throw Error(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(n_cols) + " fields, found " +
                        std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

std::vector<EdgeRow> read_edge_list(const std::string& path) {
    auto rows = read_rows(path, "period_label,sender_id,receiver_id,weight");
    std::vector<EdgeRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        EdgeRow e{r[0], r[1], r[2], parse_int(r[3])};
        if (e.weight < 0) throw Error(path + ": negative weight for " + e.sender + "->" + e.receiver);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<DyadCovRow> read_dyad_covariates(const std::string& path) {
    auto rows = read_rows(path, "period_label,sender_id,receiver_id,cov_name,value");
    std::vector<DyadCovRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(DyadCovRow{r[0], r[1], r[2], r[3], parse_double(r[4])});
    return out;
}

AttributeTable read_attributes(const std::string& path,
                               const std::vector<AttributeSchema>& declarations) {
    AttributeTable table;
    for (const auto& s : declarations) table.declare(s);
    auto rows = read_rows(path, "period_label,node_id,attr_name,value");
    for (const auto& r : rows) {
        const std::string& period = r[0];
        const std::string& node = r[1];
        const std::string& attr = r[2];
        const std::string& value = r[3];
        if (!table.declared(attr))
            throw Error(path + ": attribute '" + attr + "' is not declared in the run config");
        if (value == "NA") {
            table.set_missing(period, node, attr);
            continue;
        }
        const AttributeSchema& schema = table.schema(attr);
        if (schema.type == AttrType::Categorical)
            table.set_level(period, node, attr, value);
        else
            table.set_numeric(period, node, attr, parse_double(value));
    }
    return table;
}

IngestResult assemble_panel(const std::vector<EdgeRow>& edges, AttributeTable attributes,
                            const std::vector<DyadCovRow>& dyad_covs, int memory_order) {
    // collect periods and rosters
    std::map<long long, std::string> period_labels;  // ordered by numeric label
    auto note_period = [&](const std::string& label) {
        period_labels.emplace(parse_int(label), label);
    };
    std::map<std::string, std::set<std::string>> roster;  // label -> ids
    for (const auto& e : edges) {
        note_period(e.period);
        roster[e.period].insert(e.sender);
        roster[e.period].insert(e.receiver);
    }
    // attribute rows contribute periods and roster members (isolates, and
    // periods with zero ties, enter the panel here)
    for (const auto& label : attributes.periods()) {
        note_period(label);
        for (const auto& id : attributes.node_ids(label)) roster[label].insert(id);
    }

    IngestResult result;
    std::vector<PanelPeriod> periods;
    for (const auto& [value, label] : period_labels) {
        (void)value;
        std::vector<std::string> ids(roster[label].begin(), roster[label].end());
        std::map<std::string, int> index;
        for (std::size_t k = 0; k < ids.size(); ++k) index[ids[k]] = static_cast<int>(k);
        auto n = static_cast<std::size_t>(ids.size());
        std::vector<long long> w(n * n, 0);
        for (const auto& e : edges) {
            if (e.period != label) continue;
            int i = index[e.sender];
            int j = index[e.receiver];
            w[static_cast<std::size_t>(i) * n + j] += e.weight;
        }
        PanelPeriod p;
        p.label = label;
        p.weighted = WeightedGraph(std::move(ids), std::move(w));
        if (int z = p.weighted->zeroed_diagonal_entries(); z > 0)
            result.warnings.push_back("period '" + label + "': zeroed " + std::to_string(z) +
                                      " nonzero diagonal (self-tie) entr" + (z == 1 ? "y" : "ies"));
        periods.push_back(std::move(p));
    }
    if (periods.empty()) throw Error("no periods found in input files");

    // dyad covariates: dense per-period matrices, zero default
    DyadCovariates covs;
    std::set<std::string> cov_names;
    for (const auto& r : dyad_covs) cov_names.insert(r.name);
    for (const auto& name : cov_names) {
        std::vector<std::vector<double>> mats;
        for (const auto& p : periods) {
            auto n = static_cast<std::size_t>(p.size());
            mats.emplace_back(n * n, 0.0);
        }
        covs[name] = std::move(mats);
    }
    for (const auto& r : dyad_covs) {
        int t = -1;
        for (std::size_t k = 0; k < periods.size(); ++k)
            if (periods[k].label == r.period) t = static_cast<int>(k);
        if (t < 0)
            throw Error("dyad covariate '" + r.name + "' names unknown period '" + r.period + "'");
        const auto& ids = periods[static_cast<std::size_t>(t)].node_ids();
        auto find = [&](const std::string& id) {
            auto it = std::lower_bound(ids.begin(), ids.end(), id);
            if (it == ids.end() || *it != id)
                throw Error("dyad covariate '" + r.name + "' period '" + r.period +
                            "': unknown node '" + id + "'");
            return static_cast<int>(it - ids.begin());
        };
        int i = find(r.sender);
        int j = find(r.receiver);
        covs[r.name][static_cast<std::size_t>(t)][static_cast<std::size_t>(i) * ids.size() + j] =
            r.value;
    }

    result.panel = PanelNetwork::build(std::move(periods), std::move(attributes), std::move(covs),
                                       memory_order);
    return result;
}

void write_edge_list(const std::string& path, const PanelNetwork& panel) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "period_label,sender_id,receiver_id,weight\n";
    for (int t = 0; t < panel.period_count(); ++t) {
        const auto& p = panel.period(t);
        const auto& ids = p.node_ids();
        int n = p.size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                long long w = 0;
                if (p.weighted)
                    w = p.weighted->weight(i, j);
                else if (p.binary && p.binary->edge(i, j))
                    w = 1;
                if (w > 0)
                    out << p.label << ',' << ids[i] << ',' << ids[j] << ',' << w << '\n';
            }
    }
}

void write_attributes(const std::string& path, const PanelNetwork& panel) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "period_label,node_id,attr_name,value\n";
    const auto& attrs = panel.attributes();
    for (int t = 0; t < panel.period_count(); ++t) {
        const auto& p = panel.period(t);
        for (const auto& id : p.node_ids()) {
            for (const auto& schema : attrs.schemas()) {
                if (schema.type == AttrType::Categorical) {
                    auto lvl = attrs.level_of(p.label, id, schema.name);
                    if (lvl)
                        out << p.label << ',' << id << ',' << schema.name << ','
                            << schema.levels[static_cast<std::size_t>(*lvl)] << '\n';
                } else {
                    auto v = attrs.numeric(p.label, id, schema.name);
                    if (v)
                        out << p.label << ',' << id << ',' << schema.name << ','
                            << format_double(*v) << '\n';
                }
            }
        }
    }
}

}  // namespace tergm
