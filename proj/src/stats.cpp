#include "tergm/stats.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include "tergm/util.hpp"

namespace tergm {

namespace {

// gwesp edge weight: w(m) = 1 - (1 - e^-phi)^m, with w(0) = 0
inline double gwesp_weight(double one_minus_em_phi, int m) {
    return 1.0 - std::pow(one_minus_em_phi, static_cast<double>(m));
}

// shared partners of the ordered pair (i, j) under the configured rule,
// never counting paths through the (i, j) or (j, i) cells themselves
inline int shared_partners(AdjView g, SharedPartnerRule rule, int i, int j) {
    int s = 0;
    if (rule == SharedPartnerRule::OutgoingTwoPath) {
        for (int k = 0; k < g.n; ++k)
            if (k != i && k != j && g.edge(i, k) && g.edge(k, j)) ++s;
    } else {
        for (int k = 0; k < g.n; ++k)
            if (k != i && k != j && g.edge(j, k) && g.edge(k, i)) ++s;
    }
    return s;
}

}  // namespace

bool BoundTerm::dyad_local() const {
    switch (kind) {
        case TermKind::Edges:
        case TermKind::SenderAttr:
        case TermKind::ReceiverAttr:
        case TermKind::Match:
        case TermKind::AbsDiff:
        case TermKind::NodeMix:
        case TermKind::DyadCov:
        case TermKind::PeriodCov:
            return true;
        case TermKind::Interaction:
            for (const auto& op : operands)
                if (!op.dyad_local()) return false;
            return true;
        default:
            return false;
    }
}

BoundTerm bind_term(const ModelTerm& term, const Covariates& covs, int n) {
    BoundTerm b;
    b.term = &term;
    b.kind = term.kind;
    b.decay = term.decay;
    b.sp_rule = term.sp_rule;
    if (term.decay < 0) throw Error("term '" + term.name() + "': decay must be nonnegative");
    if (term.kind == TermKind::Gwesp) {
        b.e_phi = std::exp(term.decay);
        b.one_minus_em_phi = 1.0 - std::exp(-term.decay);
    }

    auto need_numeric = [&](const std::string& attr) -> const double* {
        auto it = covs.numeric.find(attr);
        if (it == covs.numeric.end()) {
            if (covs.categorical.count(attr))
                throw Error("term '" + term.name() + "': attribute '" + attr +
                            "' is categorical, a numeric attribute is required");
            throw Error("term '" + term.name() + "': unknown attribute '" + attr + "'");
        }
        if (it->second.size() != static_cast<std::size_t>(n))
            throw Error("term '" + term.name() + "': attribute '" + attr +
                        "' column does not match roster size");
        return it->second.data();
    };

    switch (term.kind) {
        case TermKind::SenderAttr:
        case TermKind::ReceiverAttr:
        case TermKind::AbsDiff:
            b.num = need_numeric(term.attr);
            break;
        case TermKind::Match: {
            auto it = covs.categorical.find(term.attr);
            if (it != covs.categorical.end()) {
                if (it->second.value.size() != static_cast<std::size_t>(n))
                    throw Error("term '" + term.name() + "': attribute '" + term.attr +
                                "' column does not match roster size");
                b.cat = it->second.value.data();
            } else {
                b.num = need_numeric(term.attr);
            }
            break;
        }
        case TermKind::NodeMix: {
            auto it = covs.categorical.find(term.attr);
            if (it == covs.categorical.end())
                throw Error("term '" + term.name() + "': unknown categorical attribute '" +
                            term.attr + "'");
            const CategoricalColumn& col = it->second;
            if (col.value.size() != static_cast<std::size_t>(n))
                throw Error("term '" + term.name() + "': attribute '" + term.attr +
                            "' column does not match roster size");
            b.cat = col.value.data();
            for (std::size_t k = 0; k < col.levels.size(); ++k) {
                if (col.levels[k] == term.sender_level) b.lvl_sender = static_cast<int>(k);
                if (col.levels[k] == term.receiver_level) b.lvl_receiver = static_cast<int>(k);
            }
            if (b.lvl_sender < 0)
                throw Error("term '" + term.name() + "': '" + term.sender_level +
                            "' is not a level of '" + term.attr + "'");
            if (b.lvl_receiver < 0)
                throw Error("term '" + term.name() + "': '" + term.receiver_level +
                            "' is not a level of '" + term.attr + "'");
            break;
        }
        case TermKind::DyadCov: {
            auto it = covs.dyad.find(term.cov);
            if (it == covs.dyad.end())
                throw Error("term '" + term.name() + "': unknown dyad covariate '" + term.cov +
                            "'");
            if (it->second.size() != static_cast<std::size_t>(n) * n)
                throw Error("term '" + term.name() + "': dyad covariate '" + term.cov +
                            "' does not match roster size");
            b.dyad = it->second.data();
            break;
        }
        case TermKind::PeriodCov: {
            if (covs.period_index < 0 ||
                covs.period_index >= static_cast<int>(term.period_values.size()))
                throw Error("term '" + term.name() + "': period_cov has " +
                            std::to_string(term.period_values.size()) +
                            " values but the period index is " +
                            std::to_string(covs.period_index));
            b.period_value = term.period_values[static_cast<std::size_t>(covs.period_index)];
            break;
        }
        case TermKind::Interaction:
            for (const auto& op : term.operands) b.operands.push_back(bind_term(op, covs, n));
            if (b.operands.size() != 2)
                throw Error("term '" + term.name() + "': interaction needs exactly two operands");
            break;
        default:
            break;
    }
    return b;
}

std::vector<BoundTerm> bind_model(const ModelSpec& model, const Covariates& covs, int n) {
    std::vector<BoundTerm> out;
    out.reserve(model.terms.size());
    for (const auto& t : model.terms) out.push_back(bind_term(t, covs, n));
    return out;
}

namespace {

// The value a dyad contributes to a term's global sum when the tie (i, j)
// is present. For dyad-local kinds this is the covariate contribution; for
// structural kinds it is the toggle difference, which every non-interaction
// kind computes by direct formula. Interactions multiply their operands'
// contributions, so this never recurses through a toggle.
double per_dyad_contribution(const BoundTerm& term, AdjView g, int i, int j) {
    if (term.kind == TermKind::Interaction)
        return per_dyad_contribution(term.operands[0], g, i, j) *
               per_dyad_contribution(term.operands[1], g, i, j);
    return change_statistic(term, g, i, j);
}

}  // namespace

double change_statistic(const BoundTerm& term, AdjView g, int i, int j) {
    switch (term.kind) {
        case TermKind::Edges:
            return 1.0;
        case TermKind::Reciprocity:
            return g.edge(j, i) ? 1.0 : 0.0;
        case TermKind::GWOutDegree: {
            int d = 0;
            for (int k = 0; k < g.n; ++k)
                if (k != j && g.edge(i, k)) ++d;
            return std::exp(-term.decay * (d + 1)) - std::exp(-term.decay * d);
        }
        case TermKind::GWInDegree: {
            int d = 0;
            for (int k = 0; k < g.n; ++k)
                if (k != i && g.edge(k, j)) ++d;
            return std::exp(-term.decay * (d + 1)) - std::exp(-term.decay * d);
        }
        case TermKind::Gwesp: {
            // all shared-partner counts taken with the (i, j) cell off
            const double u = term.one_minus_em_phi;
            int s = shared_partners(g, term.sp_rule, i, j);
            double acc = gwesp_weight(u, s);
            if (term.sp_rule == SharedPartnerRule::OutgoingTwoPath) {
                for (int k = 0; k < g.n; ++k) {
                    if (k == i || k == j) continue;
                    // edge (i, k) gains partner j via the new path i->j->k
                    if (g.edge(i, k) && g.edge(j, k)) {
                        int t = 0;
                        for (int m = 0; m < g.n; ++m)
                            if (m != i && m != k && m != j && g.edge(i, m) && g.edge(m, k)) ++t;
                        acc += gwesp_weight(u, t + 1) - gwesp_weight(u, t);
                    }
                    // edge (k, j) gains partner i via the new path k->i->j
                    if (g.edge(k, j) && g.edge(k, i)) {
                        int t = 0;
                        for (int m = 0; m < g.n; ++m)
                            if (m != k && m != j && m != i && g.edge(k, m) && g.edge(m, j)) ++t;
                        acc += gwesp_weight(u, t + 1) - gwesp_weight(u, t);
                    }
                }
            } else {
                for (int k = 0; k < g.n; ++k) {
                    if (k == i || k == j) continue;
                    // edge (k, i) gains partner j: partner rule k->i needs i->m->k; m=j uses (i,j)
                    if (g.edge(k, i) && g.edge(j, k)) {
                        int t = 0;
                        for (int m = 0; m < g.n; ++m)
                            if (m != k && m != i && m != j && g.edge(i, m) && g.edge(m, k)) ++t;
                        acc += gwesp_weight(u, t + 1) - gwesp_weight(u, t);
                    }
                    // edge (j, k) gains partner i: partner rule j->k needs k->m->j; m=i uses (i,j)
                    if (g.edge(j, k) && g.edge(k, i)) {
                        int t = 0;
                        for (int m = 0; m < g.n; ++m)
                            if (m != j && m != k && m != i && g.edge(k, m) && g.edge(m, j)) ++t;
                        acc += gwesp_weight(u, t + 1) - gwesp_weight(u, t);
                    }
                }
            }
            return term.e_phi * acc;
        }
        case TermKind::SenderAttr:
            return term.num[i];
        case TermKind::ReceiverAttr:
            return term.num[j];
        case TermKind::Match:
            if (term.cat) return (term.cat[i] >= 0 && term.cat[i] == term.cat[j]) ? 1.0 : 0.0;
            return term.num[i] == term.num[j] ? 1.0 : 0.0;
        case TermKind::AbsDiff:
            return std::fabs(term.num[i] - term.num[j]);
        case TermKind::NodeMix:
            return (term.cat[i] == term.lvl_sender && term.cat[j] == term.lvl_receiver) ? 1.0
                                                                                        : 0.0;
        case TermKind::DyadCov:
            return term.dyad[static_cast<std::size_t>(i) * g.n + j];
        case TermKind::PeriodCov:
            return term.period_value;
        case TermKind::Interaction: {
            if (term.dyad_local())
                return change_statistic(term.operands[0], g, i, j) *
                       change_statistic(term.operands[1], g, i, j);
            return change_statistic_by_toggle(term, g, i, j);
        }
    }
    throw Error("unhandled term kind");
}

double global_statistic(const BoundTerm& term, AdjView g) {
    const int n = g.n;
    switch (term.kind) {
        case TermKind::Edges: {
            long long e = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (g.edge(i, j)) ++e;
            return static_cast<double>(e);
        }
        case TermKind::Reciprocity: {
            long long m = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (g.edge(i, j) && g.edge(j, i)) ++m;
            return static_cast<double>(m);
        }
        case TermKind::GWOutDegree:
        case TermKind::GWInDegree: {
            Degrees d = degrees(g);
            const std::vector<int>& deg = term.kind == TermKind::GWOutDegree ? d.out : d.in;
            KahanSum sum;
            for (int v : deg) sum.add(std::exp(-term.decay * v));
            return sum.value();
        }
        case TermKind::Gwesp: {
            KahanSum sum;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j || !g.edge(i, j)) continue;
                    int s = shared_partners(g, term.sp_rule, i, j);
                    sum.add(gwesp_weight(term.one_minus_em_phi, s));
                }
            return term.e_phi * sum.value();
        }
        default: {
            // covariate families and interactions: sum the per-dyad
            // contribution over present ties
            KahanSum sum;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j || !g.edge(i, j)) continue;
                    sum.add(per_dyad_contribution(term, g, i, j));
                }
            return sum.value();
        }
    }
}

double change_statistic_by_toggle(const BoundTerm& term, AdjView g, int i, int j) {
    std::vector<std::uint8_t> buf(g.a, g.a + static_cast<std::size_t>(g.n) * g.n);
    AdjView v{g.n, buf.data()};
    buf[static_cast<std::size_t>(i) * g.n + j] = 1;
    double on = global_statistic(term, v);
    buf[static_cast<std::size_t>(i) * g.n + j] = 0;
    double off = global_statistic(term, v);
    return on - off;
}

double global_statistic(const ModelTerm& term, const DirectedGraph& graph,
                        const Covariates& covs) {
    return global_statistic(bind_term(term, covs, graph.size()), graph.view());
}

double change_statistic(const ModelTerm& term, const DirectedGraph& graph, const Covariates& covs,
                        int i, int j) {
    return change_statistic(bind_term(term, covs, graph.size()), graph.view(), i, j);
}

namespace {

void collect_required(const ModelTerm& t, std::set<std::string>& sender,
                      std::set<std::string>& receiver) {
    switch (t.kind) {
        case TermKind::SenderAttr:
            sender.insert(t.attr);
            break;
        case TermKind::ReceiverAttr:
            receiver.insert(t.attr);
            break;
        case TermKind::Match:
        case TermKind::AbsDiff:
        case TermKind::NodeMix:
            sender.insert(t.attr);
            receiver.insert(t.attr);
            break;
        case TermKind::Interaction:
            for (const auto& op : t.operands) collect_required(op, sender, receiver);
            break;
        default:
            break;
    }
}

}  // namespace

UsableNodes usable_nodes(const ModelSpec& model, const Covariates& covs, int n) {
    std::set<std::string> sender_attrs, receiver_attrs;
    for (const auto& t : model.terms) collect_required(t, sender_attrs, receiver_attrs);

    auto present = [&](const std::string& attr, int node) {
        auto numit = covs.numeric.find(attr);
        if (numit != covs.numeric.end())
            return node < static_cast<int>(numit->second.size()) &&
                   !std::isnan(numit->second[static_cast<std::size_t>(node)]);
        auto catit = covs.categorical.find(attr);
        if (catit != covs.categorical.end())
            return node < static_cast<int>(catit->second.value.size()) &&
                   catit->second.value[static_cast<std::size_t>(node)] >= 0;
        return false;
    };

    UsableNodes u;
    u.can_send.assign(static_cast<std::size_t>(n), 1);
    u.can_receive.assign(static_cast<std::size_t>(n), 1);
    for (int v = 0; v < n; ++v) {
        for (const auto& a : sender_attrs)
            if (!present(a, v)) {
                u.can_send[static_cast<std::size_t>(v)] = 0;
                break;
            }
        for (const auto& a : receiver_attrs)
            if (!present(a, v)) {
                u.can_receive[static_cast<std::size_t>(v)] = 0;
                break;
            }
    }
    return u;
}

ChangeStatMatrix change_statistics(const ModelSpec& model, const DirectedGraph& graph,
                                   const Covariates& covs, int workers) {
    model.validate();
    const int n = graph.size();
    std::vector<BoundTerm> bound = bind_model(model, covs, n);
    UsableNodes usable = usable_nodes(model, covs, n);
    AdjView g = graph.view();

    ChangeStatMatrix out;
    out.term_names = model.term_names();
    const auto n_terms = out.term_names.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (usable.can_send[static_cast<std::size_t>(i)] &&
                usable.can_receive[static_cast<std::size_t>(j)])
                out.dyads.emplace_back(i, j);
            else
                ++out.dropped_dyads;
        }
    out.delta.assign(out.dyads.size() * n_terms, 0.0);
    out.y.assign(out.dyads.size(), 0);

    const std::int64_t block = 1024;
    auto n_rows = static_cast<std::int64_t>(out.dyads.size());
    std::int64_t n_blocks = (n_rows + block - 1) / block;
    parallel_for(n_blocks, workers, [&](std::int64_t b) {
        std::int64_t lo = b * block;
        std::int64_t hi = std::min(n_rows, lo + block);
        for (std::int64_t r = lo; r < hi; ++r) {
            auto [i, j] = out.dyads[static_cast<std::size_t>(r)];
            out.y[static_cast<std::size_t>(r)] = g.edge(i, j) ? 1 : 0;
            double* row = out.delta.data() + static_cast<std::size_t>(r) * n_terms;
            for (std::size_t c = 0; c < n_terms; ++c)
                row[c] = change_statistic(bound[c], g, i, j);
        }
    });
    return out;
}

}  // namespace tergm
