#include "tergm/attributes.hpp"

#include "tergm/util.hpp"

namespace tergm {

int AttributeSchema::level_index(const std::string& level) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == level) return static_cast<int>(k);
    return -1;
}

void AttributeTable::declare(AttributeSchema schema) {
    if (schema.name.empty()) throw Error("attribute name must be nonempty");
    if (declared(schema.name)) throw Error("attribute declared twice: " + schema.name);
    if (schema.type == AttrType::Categorical && schema.levels.empty())
        throw Error("categorical attribute '" + schema.name + "' needs a level set");
    if (schema.type != AttrType::Categorical && !schema.levels.empty())
        throw Error("attribute '" + schema.name + "' is not categorical but declares levels");
    schemas_.push_back(std::move(schema));
}

bool AttributeTable::declared(const std::string& attr) const {
    for (const auto& s : schemas_)
        if (s.name == attr) return true;
    return false;
}

const AttributeSchema& AttributeTable::schema(const std::string& attr) const {
    for (const auto& s : schemas_)
        if (s.name == attr) return s;
    throw Error("unknown attribute: " + attr);
}

const AttributeSchema& AttributeTable::checked_schema(const std::string& attr,
                                                      AttrType expected) const {
    const AttributeSchema& s = schema(attr);
    if (expected == AttrType::Categorical && s.type != AttrType::Categorical)
        throw Error("attribute '" + attr + "' is not categorical");
    if (expected != AttrType::Categorical && s.type == AttrType::Categorical)
        throw Error("attribute '" + attr + "' is categorical");
    return s;
}

void AttributeTable::set_numeric(const std::string& period, const std::string& node,
                                 const std::string& attr, double value) {
    const AttributeSchema& s = checked_schema(attr, AttrType::Numeric);
    if (s.type == AttrType::Binary && value != 0.0 && value != 1.0)
        throw Error("binary attribute '" + attr + "' must be 0 or 1 (node " + node + ")");
    numeric_[attr][period][node] = value;
    mentioned_[period].insert(node);
}

void AttributeTable::set_level(const std::string& period, const std::string& node,
                               const std::string& attr, const std::string& level) {
    const AttributeSchema& s = checked_schema(attr, AttrType::Categorical);
    int idx = s.level_index(level);
    if (idx < 0)
        throw Error("value '" + level + "' is not a declared level of attribute '" + attr +
                    "' (node " + node + ")");
    levels_[attr][period][node] = idx;
    mentioned_[period].insert(node);
}

void AttributeTable::set_missing(const std::string& period, const std::string& node,
                                 const std::string& attr) {
    schema(attr);  // must be declared
    mentioned_[period].insert(node);
}

std::optional<double> AttributeTable::numeric(const std::string& period, const std::string& node,
                                              const std::string& attr) const {
    auto a = numeric_.find(attr);
    if (a == numeric_.end()) return std::nullopt;
    auto p = a->second.find(period);
    if (p == a->second.end()) return std::nullopt;
    auto n = p->second.find(node);
    if (n == p->second.end()) return std::nullopt;
    return n->second;
}

std::optional<int> AttributeTable::level_of(const std::string& period, const std::string& node,
                                            const std::string& attr) const {
    auto a = levels_.find(attr);
    if (a == levels_.end()) return std::nullopt;
    auto p = a->second.find(period);
    if (p == a->second.end()) return std::nullopt;
    auto n = p->second.find(node);
    if (n == p->second.end()) return std::nullopt;
    return n->second;
}

std::set<std::string> AttributeTable::node_ids(const std::string& period) const {
    auto it = mentioned_.find(period);
    if (it == mentioned_.end()) return {};
    return it->second;
}

std::set<std::string> AttributeTable::periods() const {
    std::set<std::string> out;
    for (const auto& [period, nodes] : mentioned_) {
        (void)nodes;
        out.insert(period);
    }
    return out;
}

}  // namespace tergm
