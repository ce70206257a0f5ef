#include "tergm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tergm/estimation.hpp"
#include "tergm/rng.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

std::vector<std::string> default_ids(int n) {
    int width = 1;
    for (int v = n; v >= 10; v /= 10) ++width;
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        std::string num = std::to_string(k);
        ids.push_back("n" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
    }
    return ids;
}

// cell index of (i, j) among off-diagonal cells in row-major order
inline std::size_t cell_index(int n, int i, int j) {
    return static_cast<std::size_t>(i) * (n - 1) + static_cast<std::size_t>(j > i ? j - 1 : j);
}

}  // namespace

DirectedGraph ExactDistribution::decode(std::size_t code) const {
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (code >> cell_index(n, i, j) & 1u)
                adj[static_cast<std::size_t>(i) * n + j] = 1;
        }
    return DirectedGraph(default_ids(n), std::move(adj));
}

double ExactDistribution::expected_statistic(std::size_t term) const {
    KahanSum sum;
    for (std::size_t g = 0; g < prob.size(); ++g) sum.add(prob[g] * stats[g][term]);
    return sum.value();
}

double ExactDistribution::statistic_variance(std::size_t term) const {
    double mean = expected_statistic(term);
    KahanSum sum;
    for (std::size_t g = 0; g < prob.size(); ++g) {
        double d = stats[g][term] - mean;
        sum.add(prob[g] * d * d);
    }
    return sum.value();
}

double ExactDistribution::tie_marginal(int i, int j) const {
    if (i == j) return 0.0;
    std::size_t cell = cell_index(n, i, j);
    KahanSum sum;
    for (std::size_t g = 0; g < prob.size(); ++g)
        if (g >> cell & 1u) sum.add(prob[g]);
    return sum.value();
}

ExactDistribution enumerate_exact(int n, const ModelSpec& model, const Eigen::VectorXd& theta,
                                  const Covariates& covs) {
    if (n < 2) throw Error("enumeration needs at least 2 nodes");
    if (n > 4)
        throw Error("exact enumeration is limited to n <= 4 (state space 2^(n(n-1)))");
    model.validate();
    if (theta.size() != model.term_count())
        throw Error("theta length does not match the number of model terms");

    ExactDistribution dist;
    dist.n = n;
    dist.term_names = model.term_names();
    const int cells = n * (n - 1);
    const std::size_t count = std::size_t{1} << cells;

    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    AdjView view{n, adj.data()};
    std::vector<BoundTerm> bound = bind_model(model, covs, n);

    dist.log_weight.resize(count);
    dist.stats.resize(count);
    for (std::size_t code = 0; code < count; ++code) {
        std::fill(adj.begin(), adj.end(), 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (code >> cell_index(n, i, j) & 1u)
                    adj[static_cast<std::size_t>(i) * n + j] = 1;
            }
        std::vector<double> h(bound.size());
        double lw = 0.0;
        for (std::size_t k = 0; k < bound.size(); ++k) {
            h[k] = global_statistic(bound[k], view);
            lw += theta(static_cast<Eigen::Index>(k)) * h[k];
        }
        dist.stats[code] = std::move(h);
        dist.log_weight[code] = lw;
    }

    // normalize through log-sum-exp
    double max_lw = *std::max_element(dist.log_weight.begin(), dist.log_weight.end());
    KahanSum z;
    for (double lw : dist.log_weight) z.add(std::exp(lw - max_lw));
    dist.log_normalizer = max_lw + std::log(z.value());
    dist.prob.resize(count);
    for (std::size_t g = 0; g < count; ++g)
        dist.prob[g] = std::exp(dist.log_weight[g] - dist.log_normalizer);
    return dist;
}

std::vector<DirectedGraph> gibbs_sample(int n, const ModelSpec& model,
                                        const Eigen::VectorXd& theta, const Covariates& covs,
                                        const GibbsOptions& options,
                                        std::vector<std::string> node_ids) {
    if (n < 2) throw Error("sampler needs at least 2 nodes");
    if (options.burn_in < 0 || options.thinning < 0 || options.count < 0)
        throw Error("burn-in, thinning and count must be nonnegative");
    model.validate();
    if (theta.size() != model.term_count())
        throw Error("theta length does not match the number of model terms");
    if (node_ids.empty()) node_ids = default_ids(n);

    std::vector<BoundTerm> bound = bind_model(model, covs, n);
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    AdjView view{n, adj.data()};
    Rng rng(options.seed);

    auto sweep = [&]() {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double logit = 0.0;
                for (std::size_t k = 0; k < bound.size(); ++k)
                    logit += theta(static_cast<Eigen::Index>(k)) *
                             change_statistic(bound[k], view, i, j);
                double p = inverse_logit(logit);
                adj[static_cast<std::size_t>(i) * n + j] = rng.uniform() < p ? 1 : 0;
            }
    };

    for (int s = 0; s < options.burn_in; ++s) sweep();
    std::vector<DirectedGraph> draws;
    draws.reserve(static_cast<std::size_t>(options.count));
    for (int d = 0; d < options.count; ++d) {
        if (d > 0)
            for (int s = 0; s < options.thinning; ++s) sweep();
        else
            sweep();  // first retained draw follows one more sweep past burn-in
        draws.emplace_back(node_ids, adj);
    }
    return draws;
}

PanelNetwork simulate_panel(int n, int periods, const ModelSpec& model,
                            const Eigen::VectorXd& theta, const AttributeGeneratorSpec& attrs,
                            std::uint64_t seed, const GibbsOptions& chain, int workers,
                            int memory_order) {
    if (periods < 1) throw Error("panel needs at least one period");
    std::vector<std::string> ids = default_ids(n);

    // generate one set of node attributes, shared by every period
    AttributeTable table;
    Covariates covs;
    Rng attr_rng = Rng::substream(seed, 0);
    for (const auto& spec : attrs.categorical) {
        if (spec.levels.empty() || spec.levels.size() != spec.shares.size())
            throw Error("attribute generator '" + spec.name + "': levels and shares must align");
        table.declare({spec.name, AttrType::Categorical, spec.levels});
        // largest-remainder apportionment of n nodes to the level shares
        double total = std::accumulate(spec.shares.begin(), spec.shares.end(), 0.0);
        if (total <= 0) throw Error("attribute generator '" + spec.name + "': shares must be positive");
        std::vector<int> counts(spec.levels.size(), 0);
        std::vector<std::pair<double, std::size_t>> remainders;
        int assigned = 0;
        for (std::size_t k = 0; k < spec.levels.size(); ++k) {
            double exact = static_cast<double>(n) * spec.shares[k] / total;
            counts[k] = static_cast<int>(std::floor(exact));
            assigned += counts[k];
            remainders.emplace_back(-(exact - std::floor(exact)), k);
        }
        std::sort(remainders.begin(), remainders.end());
        for (int r = 0; r < n - assigned; ++r)
            ++counts[remainders[static_cast<std::size_t>(r)].second];

        CategoricalColumn col;
        col.levels = spec.levels;
        col.value.reserve(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < counts.size(); ++k)
            col.value.insert(col.value.end(), static_cast<std::size_t>(counts[k]),
                             static_cast<int>(k));
        covs.categorical[spec.name] = std::move(col);
    }
    for (const auto& spec : attrs.numeric) {
        table.declare({spec.name, AttrType::Numeric, {}});
        std::vector<double> col(static_cast<std::size_t>(n));
        for (auto& v : col) v = spec.lo + (spec.hi - spec.lo) * attr_rng.uniform();
        covs.numeric[spec.name] = std::move(col);
    }

    std::vector<PanelPeriod> panel_periods(static_cast<std::size_t>(periods));
    auto sample_period = [&](std::int64_t t, const Covariates& period_covs) {
        GibbsOptions per_chain = chain;
        per_chain.count = 1;
        per_chain.seed = Rng::substream(seed, 1000 + static_cast<std::uint64_t>(t)).raw();
        auto draws = gibbs_sample(n, model, theta, period_covs, per_chain, ids);
        PanelPeriod& p = panel_periods[static_cast<std::size_t>(t)];
        p.label = std::to_string(t + 1);
        p.binary = std::move(draws.front());
    };
    if (memory_order == 0) {
        // periods are independent draws; chains can run concurrently
        parallel_for(periods, workers, [&](std::int64_t t) {
            Covariates period_covs = covs;
            period_covs.period_index = static_cast<int>(t);
            sample_period(t, period_covs);
        });
    } else {
        // each network is drawn conditional on the previous realizations,
        // exposed to the model as lag1..lagK matrices (zero before the
        // panel starts); necessarily sequential
        for (std::int64_t t = 0; t < periods; ++t) {
            Covariates period_covs = covs;
            period_covs.period_index = static_cast<int>(t);
            for (int k = 1; k <= memory_order; ++k) {
                std::vector<double> lag(static_cast<std::size_t>(n) * n, 0.0);
                if (t - k >= 0) {
                    const DirectedGraph& prev =
                        *panel_periods[static_cast<std::size_t>(t - k)].binary;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            if (a != b && prev.edge(a, b))
                                lag[static_cast<std::size_t>(a) * n + b] = 1.0;
                }
                period_covs.dyad["lag" + std::to_string(k)] = std::move(lag);
            }
            sample_period(t, period_covs);
        }
    }

    // write the shared attributes into every period of the table
    for (int t = 0; t < periods; ++t) {
        std::string label = std::to_string(t + 1);
        for (const auto& [name, col] : covs.categorical)
            for (int k = 0; k < n; ++k)
                table.set_level(label, ids[static_cast<std::size_t>(k)], name,
                                col.levels[static_cast<std::size_t>(
                                    col.value[static_cast<std::size_t>(k)])]);
        for (const auto& [name, col] : covs.numeric)
            for (int k = 0; k < n; ++k)
                table.set_numeric(label, ids[static_cast<std::size_t>(k)], name,
                                  col[static_cast<std::size_t>(k)]);
    }

    return PanelNetwork::build(std::move(panel_periods), std::move(table), {}, memory_order);
}

}  // namespace tergm
