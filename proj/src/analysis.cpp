#include "tergm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tergm/estimation.hpp"
#include "tergm/rng.hpp"
#include "tergm/util.hpp"

namespace tergm {

std::vector<double> baseline_shares(const CategoricalColumn& attr,
                                    const std::vector<std::string>& node_ids) {
    if (attr.value.empty()) throw Error("baseline shares of an empty roster");
    if (attr.value.size() != node_ids.size())
        throw Error("attribute column does not match roster size");
    std::string missing;
    std::vector<long long> counts(attr.levels.size(), 0);
    for (std::size_t k = 0; k < attr.value.size(); ++k) {
        if (attr.value[k] < 0) {
            missing += missing.empty() ? node_ids[k] : ", " + node_ids[k];
            continue;
        }
        ++counts[static_cast<std::size_t>(attr.value[k])];
    }
    if (!missing.empty())
        throw Error("baseline shares: nodes missing the attribute: " + missing);
    std::vector<double> shares(counts.size());
    for (std::size_t g = 0; g < counts.size(); ++g)
        shares[g] = static_cast<double>(counts[g]) / static_cast<double>(attr.value.size());
    return shares;
}

MixingReport mixing_matrix(const DirectedGraph& graph, const CategoricalColumn& attr,
                           const std::string& attr_name, bool self_exclusion) {
    const int n = graph.size();
    if (attr.value.size() != static_cast<std::size_t>(n))
        throw Error("attribute column does not match roster size");
    const auto L = attr.levels.size();

    // nodes that touch a tie must carry the attribute
    std::string missing;
    for (int v = 0; v < n; ++v) {
        if (attr.value[static_cast<std::size_t>(v)] >= 0) continue;
        bool has_tie = false;
        for (int u = 0; u < n && !has_tie; ++u)
            if (u != v && (graph.edge(v, u) || graph.edge(u, v))) has_tie = true;
        if (has_tie)
            missing += missing.empty() ? graph.node_ids()[static_cast<std::size_t>(v)]
                                       : ", " + graph.node_ids()[static_cast<std::size_t>(v)];
    }
    if (!missing.empty())
        throw Error("mixing matrix: nodes with ties missing attribute '" + attr_name +
                    "': " + missing);

    MixingReport report;
    report.attr = attr_name;
    report.levels = attr.levels;
    report.self_exclusion = self_exclusion;
    report.group_sizes.assign(L, 0);
    for (int v = 0; v < n; ++v)
        if (attr.value[static_cast<std::size_t>(v)] >= 0)
            ++report.group_sizes[static_cast<std::size_t>(attr.value[static_cast<std::size_t>(v)])];

    report.baseline.assign(L, 0.0);
    for (std::size_t g = 0; g < L; ++g)
        report.baseline[g] = static_cast<double>(report.group_sizes[g]) / static_cast<double>(n);

    report.tie_counts.assign(L, std::vector<long long>(L, 0));
    report.out_ties.assign(L, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || !graph.edge(i, j)) continue;
            auto g = static_cast<std::size_t>(attr.value[static_cast<std::size_t>(i)]);
            auto h = static_cast<std::size_t>(attr.value[static_cast<std::size_t>(j)]);
            ++report.tie_counts[g][h];
            ++report.out_ties[g];
        }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.observed.assign(L, std::vector<double>(L, nan));
    report.baseline_used.assign(L, std::vector<double>(L, 0.0));
    report.preferential.assign(L, std::vector<double>(L, nan));
    for (std::size_t g = 0; g < L; ++g)
        for (std::size_t h = 0; h < L; ++h) {
            if (self_exclusion)
                report.baseline_used[g][h] =
                    static_cast<double>(report.group_sizes[h] - (g == h ? 1 : 0)) /
                    static_cast<double>(n - 1);
            else
                report.baseline_used[g][h] = report.baseline[h];
            if (report.out_ties[g] > 0) {
                report.observed[g][h] = static_cast<double>(report.tie_counts[g][h]) /
                                        static_cast<double>(report.out_ties[g]);
                report.preferential[g][h] = report.observed[g][h] - report.baseline_used[g][h];
            }
        }
    return report;
}

std::string DyadSelector::describe() const {
    std::string out;
    auto side = [&](const char* tag, const SideSelector& s) {
        for (const auto& [attr, level] : s.equals)
            out += (out.empty() ? "" : " ") + std::string(tag) + "." + attr + "=" + level;
        for (const auto& [attr, lo, hi] : s.ranges)
            out += (out.empty() ? "" : " ") + std::string(tag) + "." + attr + "in[" +
                   format_double(lo) + "," + format_double(hi) + "]";
    };
    side("sender", sender);
    side("receiver", receiver);
    return out.empty() ? "(all dyads)" : out;
}

namespace {

// side selector resolved against one period's covariates
struct BoundSide {
    std::vector<std::pair<const int*, int>> cat;  // column, level index
    std::vector<std::tuple<const double*, double, double>> num;

    bool matches(int v) const {
        for (const auto& [col, lvl] : cat)
            if (col[v] != lvl) return false;
        for (const auto& [col, lo, hi] : num) {
            double x = col[v];
            if (std::isnan(x) || x < lo || x > hi) return false;
        }
        return true;
    }
};

BoundSide bind_side(const SideSelector& sel, const Covariates& covs, int n) {
    BoundSide out;
    for (const auto& [attr, level] : sel.equals) {
        auto it = covs.categorical.find(attr);
        if (it == covs.categorical.end())
            throw Error("selector: unknown categorical attribute '" + attr + "'");
        if (it->second.value.size() != static_cast<std::size_t>(n))
            throw Error("selector: attribute '" + attr + "' column does not match roster");
        int lvl = -1;
        for (std::size_t k = 0; k < it->second.levels.size(); ++k)
            if (it->second.levels[k] == level) lvl = static_cast<int>(k);
        if (lvl < 0)
            throw Error("selector: '" + level + "' is not a level of '" + attr + "'");
        out.cat.emplace_back(it->second.value.data(), lvl);
    }
    for (const auto& [attr, lo, hi] : sel.ranges) {
        auto it = covs.numeric.find(attr);
        if (it == covs.numeric.end())
            throw Error("selector: unknown numeric attribute '" + attr + "'");
        if (it->second.size() != static_cast<std::size_t>(n))
            throw Error("selector: attribute '" + attr + "' column does not match roster");
        out.num.emplace_back(it->second.data(), lo, hi);
    }
    return out;
}

struct PeriodEval {
    int t = 0;
    Covariates covs;
    std::vector<BoundTerm> bound;
    UsableNodes usable;
    const DirectedGraph* graph = nullptr;
};

ProbabilitySummary summarize_sample(const Eigen::VectorXd& theta,
                                    const std::vector<PeriodEval>& evals,
                                    const std::vector<std::tuple<int, int, int>>& matches,
                                    const std::string& selector_desc, const std::string& period,
                                    int m, std::uint64_t seed) {
    if (matches.empty())
        throw Error("selector " + selector_desc + " matches no dyads in period " + period);

    const auto n_matches = static_cast<long long>(matches.size());
    std::vector<std::size_t> chosen;
    Rng rng(seed);
    int m_used;
    if (m <= 0 || m == n_matches) {
        m_used = static_cast<int>(n_matches);
        chosen.resize(matches.size());
        for (std::size_t k = 0; k < matches.size(); ++k) chosen[k] = k;
    } else if (m < n_matches) {
        // uniform without replacement: partial Fisher-Yates
        m_used = m;
        std::vector<std::size_t> idx(matches.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        for (int k = 0; k < m; ++k) {
            auto pick = static_cast<std::size_t>(k) +
                        static_cast<std::size_t>(rng.uniform_int(
                            static_cast<std::uint64_t>(n_matches - k)));
            std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
        }
        chosen.assign(idx.begin(), idx.begin() + m);
    } else {
        // m exceeds the number of matches: sample with replacement
        m_used = m;
        chosen.resize(static_cast<std::size_t>(m));
        for (auto& c : chosen)
            c = static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(n_matches)));
    }

    std::vector<double> probs;
    probs.reserve(chosen.size());
    for (std::size_t c : chosen) {
        auto [e, i, j] = matches[c];
        const PeriodEval& ev = evals[static_cast<std::size_t>(e)];
        double logit = 0.0;
        for (std::size_t k = 0; k < ev.bound.size(); ++k)
            logit += theta(static_cast<Eigen::Index>(k)) *
                     change_statistic(ev.bound[k], ev.graph->view(), i, j);
        probs.push_back(inverse_logit(logit));
    }
    std::sort(probs.begin(), probs.end());

    ProbabilitySummary out;
    out.selector = selector_desc;
    out.period = period;
    out.matches = n_matches;
    out.sample_size = m_used;
    out.median = quantile_sorted(probs, 0.5);
    out.q25 = quantile_sorted(probs, 0.25);
    out.q75 = quantile_sorted(probs, 0.75);
    out.seed = seed;
    return out;
}

PeriodEval make_eval(const ModelSpec& model, const PanelNetwork& panel, int t) {
    PeriodEval ev;
    ev.t = t;
    ev.covs = covariates_for_period(panel, t);
    const PanelPeriod& p = panel.period(t);
    ev.graph = &*p.binary;
    ev.bound = bind_model(model, ev.covs, p.size());
    ev.usable = usable_nodes(model, ev.covs, p.size());
    return ev;
}

}  // namespace

ProbabilitySummary dyad_probability_sample(const Eigen::VectorXd& theta, const ModelSpec& model,
                                           const PanelNetwork& panel, int period,
                                           const DyadSelector& selector, int m,
                                           std::uint64_t seed) {
    model.validate();
    if (theta.size() != model.term_count())
        throw Error("theta length does not match the number of model terms");

    std::vector<int> ts;
    if (period < 0)
        ts = panel.modeled_periods();
    else
        ts.push_back(period);

    std::vector<PeriodEval> evals;
    std::vector<std::tuple<int, int, int>> matches;  // (eval index, i, j)
    for (int t : ts) {
        PeriodEval ev = make_eval(model, panel, t);
        int n = panel.period(t).size();
        BoundSide send = bind_side(selector.sender, ev.covs, n);
        BoundSide recv = bind_side(selector.receiver, ev.covs, n);
        int e = static_cast<int>(evals.size());
        for (int i = 0; i < n; ++i) {
            if (!ev.usable.can_send[static_cast<std::size_t>(i)] || !send.matches(i)) continue;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!ev.usable.can_receive[static_cast<std::size_t>(j)] || !recv.matches(j))
                    continue;
                matches.emplace_back(e, i, j);
            }
        }
        evals.push_back(std::move(ev));
    }

    std::string period_name = period < 0 ? "all" : panel.period(period).label;
    return summarize_sample(theta, evals, matches, selector.describe(), period_name, m, seed);
}

DecileCurve decile_curve(const Eigen::VectorXd& theta, const ModelSpec& model,
                         const PanelNetwork& panel, int period, const std::string& sender_attr,
                         const SideSelector& receiver, int m_per_decile, std::uint64_t seed) {
    model.validate();
    std::vector<PeriodEval> evals;
    evals.push_back(make_eval(model, panel, period));
    const PeriodEval& ev = evals.front();
    const int n = panel.period(period).size();

    auto it = ev.covs.numeric.find(sender_attr);
    if (it == ev.covs.numeric.end())
        throw Error("decile curve: unknown numeric attribute '" + sender_attr + "'");
    const std::vector<double>& column = it->second;

    std::vector<double> values;
    for (int v = 0; v < n; ++v)
        if (!std::isnan(column[static_cast<std::size_t>(v)]))
            values.push_back(column[static_cast<std::size_t>(v)]);
    std::set<double> distinct(values.begin(), values.end());
    if (distinct.size() < 10)
        throw Error("decile curve: attribute '" + sender_attr + "' has only " +
                    std::to_string(distinct.size()) +
                    " distinct value(s); use coarser quantiles than deciles");
    std::sort(values.begin(), values.end());

    DecileCurve curve;
    curve.attr = sender_attr;
    curve.boundaries.resize(11);
    for (int k = 0; k <= 10; ++k)
        curve.boundaries[static_cast<std::size_t>(k)] =
            quantile_sorted(values, static_cast<double>(k) / 10.0);

    // a value equal to an interior boundary belongs to the lower decile
    auto decile_of = [&](double v) {
        for (int d = 0; d < 9; ++d)
            if (v <= curve.boundaries[static_cast<std::size_t>(d + 1)]) return d;
        return 9;
    };

    BoundSide recv = bind_side(receiver, ev.covs, n);
    std::string period_name = panel.period(period).label;
    DyadSelector desc_sel;
    desc_sel.receiver = receiver;
    for (int d = 0; d < 10; ++d) {
        std::vector<std::tuple<int, int, int>> matches;
        for (int i = 0; i < n; ++i) {
            double v = column[static_cast<std::size_t>(i)];
            if (std::isnan(v) || decile_of(v) != d) continue;
            if (!ev.usable.can_send[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!ev.usable.can_receive[static_cast<std::size_t>(j)] || !recv.matches(j))
                    continue;
                matches.emplace_back(0, i, j);
            }
        }
        std::string desc = sender_attr + " decile " + std::to_string(d + 1) + " " +
                           desc_sel.describe();
        std::uint64_t decile_seed = Rng::substream(seed, static_cast<std::uint64_t>(d)).raw();
        ProbabilitySummary summary = summarize_sample(theta, evals, matches, desc, period_name,
                                                      m_per_decile, decile_seed);

        DecileBand band;
        band.decile = d;
        band.lower = curve.boundaries[static_cast<std::size_t>(d)];
        band.upper = curve.boundaries[static_cast<std::size_t>(d + 1)];
        band.summary = summary;
        curve.bands.push_back(std::move(band));
    }
    return curve;
}

}  // namespace tergm
