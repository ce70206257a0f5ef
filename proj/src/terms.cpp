#include "tergm/terms.hpp"

#include <set>

#include "tergm/util.hpp"

namespace tergm {

namespace {

std::string capitalize(const std::string& s) {
    if (s.empty()) return s;
    std::string out = s;
    if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

}  // namespace

std::string ModelTerm::default_label() const {
    switch (kind) {
        case TermKind::Edges: return "Edges";
        case TermKind::Reciprocity: return "Reciprocity";
        case TermKind::GWOutDegree: return "GW Out-degree";
        case TermKind::GWInDegree: return "GW In-degree";
        case TermKind::Gwesp: return "GWESP";
        case TermKind::SenderAttr: return "Sender " + attr;
        case TermKind::ReceiverAttr: return "Receiver " + attr;
        case TermKind::Match: return "Match " + attr;
        case TermKind::AbsDiff: return "AbsDiff " + attr;
        case TermKind::NodeMix:
            return capitalize(sender_level) + " -> " + capitalize(receiver_level);
        case TermKind::DyadCov: return "DyadCov " + cov;
        case TermKind::PeriodCov: return "PeriodCov";
        case TermKind::Interaction:
            if (operands.size() == 2)
                return operands[0].name() + " * " + operands[1].name();
            return "Interaction";
    }
    return "term";
}

static ModelTerm with_label(ModelTerm t) {
    if (t.label.empty()) t.label = t.default_label();
    return t;
}

ModelTerm ModelTerm::edges() {
    ModelTerm t;
    t.kind = TermKind::Edges;
    return with_label(t);
}

ModelTerm ModelTerm::reciprocity() {
    ModelTerm t;
    t.kind = TermKind::Reciprocity;
    return with_label(t);
}

ModelTerm ModelTerm::gw_out_degree(double alpha) {
    ModelTerm t;
    t.kind = TermKind::GWOutDegree;
    t.decay = alpha;
    return with_label(t);
}

ModelTerm ModelTerm::gw_in_degree(double alpha) {
    ModelTerm t;
    t.kind = TermKind::GWInDegree;
    t.decay = alpha;
    return with_label(t);
}

ModelTerm ModelTerm::gwesp(double phi, SharedPartnerRule rule) {
    ModelTerm t;
    t.kind = TermKind::Gwesp;
    t.decay = phi;
    t.sp_rule = rule;
    return with_label(t);
}

ModelTerm ModelTerm::sender_attr(std::string attr) {
    ModelTerm t;
    t.kind = TermKind::SenderAttr;
    t.attr = std::move(attr);
    return with_label(t);
}

ModelTerm ModelTerm::receiver_attr(std::string attr) {
    ModelTerm t;
    t.kind = TermKind::ReceiverAttr;
    t.attr = std::move(attr);
    return with_label(t);
}

ModelTerm ModelTerm::match(std::string attr) {
    ModelTerm t;
    t.kind = TermKind::Match;
    t.attr = std::move(attr);
    return with_label(t);
}

ModelTerm ModelTerm::absdiff(std::string attr) {
    ModelTerm t;
    t.kind = TermKind::AbsDiff;
    t.attr = std::move(attr);
    return with_label(t);
}

ModelTerm ModelTerm::node_mix(std::string attr, std::string sender_level,
                              std::string receiver_level) {
    ModelTerm t;
    t.kind = TermKind::NodeMix;
    t.attr = std::move(attr);
    t.sender_level = std::move(sender_level);
    t.receiver_level = std::move(receiver_level);
    return with_label(t);
}

ModelTerm ModelTerm::dyad_cov(std::string name) {
    ModelTerm t;
    t.kind = TermKind::DyadCov;
    t.cov = std::move(name);
    return with_label(t);
}

ModelTerm ModelTerm::period_cov(std::vector<double> values, std::string label) {
    ModelTerm t;
    t.kind = TermKind::PeriodCov;
    t.period_values = std::move(values);
    t.label = std::move(label);
    return with_label(t);
}

ModelTerm ModelTerm::interaction(ModelTerm a, ModelTerm b, std::string label) {
    ModelTerm t;
    t.kind = TermKind::Interaction;
    t.operands.push_back(std::move(a));
    t.operands.push_back(std::move(b));
    t.label = std::move(label);
    return with_label(t);
}

static void validate_term(const ModelTerm& t) {
    if (t.decay < 0) throw Error("term '" + t.name() + "': decay parameter must be nonnegative");
    switch (t.kind) {
        case TermKind::SenderAttr:
        case TermKind::ReceiverAttr:
        case TermKind::Match:
        case TermKind::AbsDiff:
            if (t.attr.empty()) throw Error("term '" + t.name() + "': attribute name required");
            break;
        case TermKind::NodeMix:
            if (t.attr.empty() || t.sender_level.empty() || t.receiver_level.empty())
                throw Error("term '" + t.name() + "': node_mix needs attr and both levels");
            break;
        case TermKind::DyadCov:
            if (t.cov.empty()) throw Error("term '" + t.name() + "': covariate name required");
            break;
        case TermKind::PeriodCov:
            if (t.period_values.empty())
                throw Error("term '" + t.name() + "': period_cov needs at least one value");
            break;
        case TermKind::Interaction:
            if (t.operands.size() != 2)
                throw Error("term '" + t.name() + "': interaction needs exactly two operands");
            for (const auto& op : t.operands) validate_term(op);
            break;
        default:
            break;
    }
}

void ModelSpec::validate() const {
    if (terms.empty()) throw Error("model has no terms");
    std::set<std::string> seen;
    for (const auto& t : terms) {
        if (t.name().empty()) throw Error("model term without a name");
        if (!seen.insert(t.name()).second)
            throw Error("duplicate term name: '" + t.name() + "'");
        validate_term(t);
        // a declared reference category must stay excluded
        if (t.kind == TermKind::NodeMix)
            for (const auto& ref : reference_exclusions)
                if (ref.attr == t.attr && ref.sender_level == t.sender_level &&
                    ref.receiver_level == t.receiver_level)
                    throw Error("term '" + t.name() + "' reintroduces the excluded reference (" +
                                ref.sender_level + ", " + ref.receiver_level + ") of '" +
                                ref.attr + "'");
    }
}

std::vector<std::string> ModelSpec::term_names() const {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.name());
    return out;
}

std::vector<ModelTerm> mixing_terms_from_attribute(
    const AttributeSchema& schema, const std::pair<std::string, std::string>& reference) {
    if (schema.type != AttrType::Categorical)
        throw Error("mixing terms need a categorical attribute, got '" + schema.name + "'");
    if (schema.level_index(reference.first) < 0 || schema.level_index(reference.second) < 0)
        throw Error("reference pair (" + reference.first + ", " + reference.second +
                    ") is not in the level set of '" + schema.name + "'");
    std::vector<ModelTerm> out;
    for (const auto& recv : schema.levels)
        for (const auto& send : schema.levels) {
            if (send == reference.first && recv == reference.second) continue;
            out.push_back(ModelTerm::node_mix(schema.name, send, recv));
        }
    return out;
}

}  // namespace tergm
