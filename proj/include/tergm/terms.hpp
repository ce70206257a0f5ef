#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tergm/attributes.hpp"

namespace tergm {

enum class TermKind {
    Edges,
    Reciprocity,
    GWOutDegree,  // sociality: sum_i exp(-alpha * outdeg_i)
    GWInDegree,   // popularity: sum_i exp(-alpha * indeg_i)
    Gwesp,        // e^phi * sum_m (1 - (1 - e^-phi)^m) * EP_m
    SenderAttr,
    ReceiverAttr,
    Match,
    AbsDiff,
    NodeMix,
    DyadCov,
    PeriodCov,
    Interaction,
};

// Directed shared-partner rule for GWESP. OutgoingTwoPath counts k with
// i->k and k->j as a partner of the edge (i,j) (the transitive pattern);
// IncomingTwoPath counts k with j->k and k->i (the cyclic pattern).
enum class SharedPartnerRule { OutgoingTwoPath, IncomingTwoPath };

struct ModelTerm {
    TermKind kind = TermKind::Edges;
    std::string label;  // unique within a ModelSpec; defaulted when empty

    std::string attr;                        // attribute-based kinds
    std::string sender_level, receiver_level;  // NodeMix
    std::string cov;                         // DyadCov
    std::vector<double> period_values;       // PeriodCov: one value per panel period
    double decay = 0.5;                      // alpha (gw degree) or phi (gwesp)
    SharedPartnerRule sp_rule = SharedPartnerRule::OutgoingTwoPath;
    std::vector<ModelTerm> operands;         // Interaction: exactly two

    std::string default_label() const;
    const std::string& name() const { return label; }

    static ModelTerm edges();
    static ModelTerm reciprocity();
    static ModelTerm gw_out_degree(double alpha);
    static ModelTerm gw_in_degree(double alpha);
    static ModelTerm gwesp(double phi, SharedPartnerRule rule = SharedPartnerRule::OutgoingTwoPath);
    static ModelTerm sender_attr(std::string attr);
    static ModelTerm receiver_attr(std::string attr);
    static ModelTerm match(std::string attr);
    static ModelTerm absdiff(std::string attr);
    static ModelTerm node_mix(std::string attr, std::string sender_level,
                              std::string receiver_level);
    static ModelTerm dyad_cov(std::string name);
    static ModelTerm period_cov(std::vector<double> values, std::string label);
    static ModelTerm interaction(ModelTerm a, ModelTerm b, std::string label = "");
};

struct MixingReference {
    std::string attr, sender_level, receiver_level;
};

struct ModelSpec {
    std::vector<ModelTerm> terms;
    std::vector<MixingReference> reference_exclusions;

    // structural checks independent of any period's data: unique labels,
    // nonnegative decay, interaction arity
    void validate() const;
    std::vector<std::string> term_names() const;
    int term_count() const { return static_cast<int>(terms.size()); }
};

// Expands a categorical attribute with L levels into the L^2 - 1 NodeMix
// indicator terms, excluding the reference pair. Enumeration is
// receiver-major in declared level order, which puts same-receiver blocks
// together the way mixing tables are usually printed.
std::vector<ModelTerm> mixing_terms_from_attribute(
    const AttributeSchema& schema, const std::pair<std::string, std::string>& reference);

}  // namespace tergm
