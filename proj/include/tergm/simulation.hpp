#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tergm/panel.hpp"
#include "tergm/stats.hpp"

namespace tergm {

// Full distribution over all 2^(n(n-1)) directed graphs on n <= 4 nodes:
// P(N) = exp(theta . h(N)) / c. Graph g is decoded from the binary code of
// its off-diagonal cells in row-major order (cell index i*(n-1) + j - (j>i)).
struct ExactDistribution {
    int n = 0;
    std::vector<std::string> term_names;
    std::vector<double> log_weight;  // theta . h(N) per graph code
    std::vector<double> prob;        // normalized
    double log_normalizer = 0.0;
    std::vector<std::vector<double>> stats;  // per graph: h(N)

    std::size_t graph_count() const { return prob.size(); }
    DirectedGraph decode(std::size_t code) const;

    // E[h_k(N)] and Var[h_k(N)] under the distribution
    double expected_statistic(std::size_t term) const;
    double statistic_variance(std::size_t term) const;
    // marginal tie probability P(i -> j)
    double tie_marginal(int i, int j) const;
};

ExactDistribution enumerate_exact(int n, const ModelSpec& model, const Eigen::VectorXd& theta,
                                  const Covariates& covs = {});

struct GibbsOptions {
    int burn_in = 100;   // full sweeps discarded before the first draw
    int thinning = 10;   // full sweeps between retained draws
    int count = 1;       // retained draws
    std::uint64_t seed = 0;
};

// Single-dyad heat-bath sampler: each sweep visits every ordered dyad in
// row-major order and resamples it from its conditional probability
// logistic(theta . delta_ij) -- the same conditionals MPLE is built on.
std::vector<DirectedGraph> gibbs_sample(int n, const ModelSpec& model,
                                        const Eigen::VectorXd& theta, const Covariates& covs,
                                        const GibbsOptions& options,
                                        std::vector<std::string> node_ids = {});

// Node attribute generator for synthetic panels: categorical attributes get
// deterministic largest-remainder group counts in node order; numeric
// attributes draw uniformly from [lo, hi).
struct AttributeGeneratorSpec {
    struct Categorical {
        std::string name;
        std::vector<std::string> levels;
        std::vector<double> shares;
    };
    struct Numeric {
        std::string name;
        double lo = 0.0, hi = 1.0;
    };
    std::vector<Categorical> categorical;
    std::vector<Numeric> numeric;
};

// T independently Gibbs-sampled networks sharing one set of generated node
// attributes, assembled into a panel with periods labeled "1".."T". Chains
// are independent (per-period substreams), so workers > 1 runs them
// concurrently without changing the result. A positive memory order is
// carried into the panel so lag covariates can be exercised downstream.
PanelNetwork simulate_panel(int n, int periods, const ModelSpec& model,
                            const Eigen::VectorXd& theta, const AttributeGeneratorSpec& attrs,
                            std::uint64_t seed, const GibbsOptions& chain = {}, int workers = 1,
                            int memory_order = 0);

}  // namespace tergm
