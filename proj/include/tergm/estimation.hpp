#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tergm/panel.hpp"
#include "tergm/stats.hpp"

namespace tergm {

// Node attribute columns, dyad covariates, materialized lag matrices
// ("lag1".."lagK" when memory_order > 0), and the period index, assembled
// for statistic evaluation on period t. The panel must hold binary networks
// (threshold first).
Covariates covariates_for_period(const PanelNetwork& panel, int t);

// Stacked change-statistic rows across all modeled periods t = K..T-1.
struct DesignMatrix {
    std::vector<std::string> term_names;
    Eigen::MatrixXd X;  // rows x terms
    Eigen::VectorXd y;  // observed ties, 0/1
    std::vector<std::string> period_labels;                   // one per modeled period
    std::vector<std::pair<long long, long long>> period_rows;  // [begin, end) per modeled period
    long long dropped_rows = 0;  // dyads dropped for missing attributes

    long long rows() const { return X.rows(); }
    int terms() const { return static_cast<int>(term_names.size()); }
};

DesignMatrix build_design(const PanelNetwork& panel, const ModelSpec& model, int workers = 1);

struct MpleOptions {
    double tolerance = 1e-8;     // convergence: max-norm of the gradient
    int max_iterations = 100;
    double separation_ridge = 1e-4;  // L2 strength of the flagged fallback fit
    int workers = 1;
};

struct MpleFit {
    Eigen::VectorXd theta;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    double log_pl = 0.0;
    bool separation = false;  // fallback estimate under the ridge below
    double ridge = 0.0;
};

// Newton-Raphson with step-halving on the pooled pseudolikelihood
//   sum_r w_r [ y_r (theta . x_r) - log(1 + e^{theta . x_r}) ].
// Throws on empty designs and on collinear or constant-zero columns (the
// offending term names are listed). Complete separation is detected by the
// estimate diverging; the result is then refit with a small L2 ridge and
// flagged, never silently dropped.
MpleFit fit_mple(const DesignMatrix& design, const MpleOptions& options = {});
MpleFit fit_mple_weighted(const DesignMatrix& design, const Eigen::VectorXd& row_weights,
                          const MpleOptions& options = {});

// Diagnostics used by the oracle and finite-difference tests.
double log_pseudolikelihood(const DesignMatrix& design, const Eigen::VectorXd& theta);
Eigen::VectorXd pseudolikelihood_gradient(const DesignMatrix& design,
                                          const Eigen::VectorXd& theta);

struct BootstrapOptions {
    int replicates = 1000;
    std::uint64_t seed = 0;
    MpleOptions mple{};
    int workers = 1;
};

struct FitResult {
    std::vector<std::string> term_names;
    Eigen::VectorXd theta;          // point estimate from the full design
    Eigen::MatrixXd replicates;     // B x terms; failed rows are NaN
    std::vector<std::uint8_t> replicate_ok;
    std::vector<std::uint8_t> replicate_ridged;  // separation fallback used
    Eigen::VectorXd ci_lower, ci_upper;          // percentile bounds per term
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    double log_pl = 0.0;
    bool separation = false;
    double ridge = 0.0;
    std::uint64_t seed = 0;
    int requested_replicates = 0;
    int failed_replicates = 0;
    bool failure_warning = false;  // more than 10% of replicates failed
    long long dropped_rows = 0;
    long long design_rows = 0;
};

// Point estimate from the full pooled design, then `replicates` refits, each
// on the modeled periods resampled with replacement (whole networks are the
// resampling unit). CI bounds are the empirical 2.5% / 97.5% percentiles:
// with B usable replicates, exactly floor(0.025 B) fall below the lower
// bound. Fully deterministic given the seed, for any worker count.
FitResult bootstrap_fit(const PanelNetwork& panel, const ModelSpec& model,
                        const BootstrapOptions& options);

double inverse_logit(double x);

// Empirical 2.5% / 97.5% bounds used for the bootstrap CIs: with B values,
// exactly floor(0.025 B) of them fall strictly below the lower bound (and
// symmetrically above the upper), up to ties.
std::pair<double, double> percentile_bounds_95(std::vector<double> values);

// 1 / (1 + e^{-theta . delta})
double predict_tie_probability(const FitResult& fit, const Eigen::VectorXd& delta);

}  // namespace tergm
