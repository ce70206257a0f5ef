#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tergm {

enum class AttrType { Numeric, Binary, Categorical };

struct AttributeSchema {
    std::string name;
    AttrType type = AttrType::Numeric;
    std::vector<std::string> levels;  // categorical only

    // -1 when not a declared level
    int level_index(const std::string& level) const;
};

// Per-period node attribute store. Values are keyed (attribute, period
// label, node id); a node without a row for some attribute is missing that
// attribute in that period. Immutable once handed to a PanelNetwork.
class AttributeTable {
public:
    void declare(AttributeSchema schema);
    bool declared(const std::string& attr) const;
    const AttributeSchema& schema(const std::string& attr) const;
    const std::vector<AttributeSchema>& schemas() const { return schemas_; }

    // numeric and binary attributes
    void set_numeric(const std::string& period, const std::string& node,
                     const std::string& attr, double value);
    // categorical attributes; level must belong to the declared level set
    void set_level(const std::string& period, const std::string& node,
                   const std::string& attr, const std::string& level);
    void set_missing(const std::string& period, const std::string& node,
                     const std::string& attr);

    std::optional<double> numeric(const std::string& period, const std::string& node,
                                  const std::string& attr) const;
    std::optional<int> level_of(const std::string& period, const std::string& node,
                                const std::string& attr) const;

    // every node id mentioned in any attribute row of the period
    std::set<std::string> node_ids(const std::string& period) const;

    // every period label mentioned by any attribute row
    std::set<std::string> periods() const;

    bool operator==(const AttributeTable&) const = default;

private:
    const AttributeSchema& checked_schema(const std::string& attr, AttrType expected) const;

    std::vector<AttributeSchema> schemas_;
    // attr -> period -> node -> value
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> numeric_;
    std::map<std::string, std::map<std::string, std::map<std::string, int>>> levels_;
    // rows explicitly flagged missing still place the node in the roster
    std::map<std::string, std::set<std::string>> mentioned_;  // period -> nodes
};

}  // namespace tergm
