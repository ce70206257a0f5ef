#include "tergm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tergm/rng.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

constexpr std::int64_t kRowBlock = 8192;  // fixed so results never depend on worker count
constexpr double kThetaCap = 30.0;        // |theta| beyond this is treated as separation

double softplus(double x) {
    // log(1 + e^x) without overflow
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

double inverse_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Covariates covariates_for_period(const PanelNetwork& panel, int t) {
    const PanelPeriod& p = panel.period(t);
    if (!p.binary)
        throw Error("period '" + p.label + "' has no binary network; apply the threshold first");
    const auto& ids = p.node_ids();
    const auto n = static_cast<std::size_t>(ids.size());
    const AttributeTable& attrs = panel.attributes();

    Covariates covs;
    covs.period_index = t;
    for (const auto& schema : attrs.schemas()) {
        if (schema.type == AttrType::Categorical) {
            CategoricalColumn col;
            col.levels = schema.levels;
            col.value.assign(n, -1);
            for (std::size_t k = 0; k < n; ++k) {
                auto lvl = attrs.level_of(p.label, ids[k], schema.name);
                if (lvl) col.value[k] = *lvl;
            }
            covs.categorical[schema.name] = std::move(col);
        } else {
            std::vector<double> col(n, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t k = 0; k < n; ++k) {
                auto v = attrs.numeric(p.label, ids[k], schema.name);
                if (v) col[k] = *v;
            }
            covs.numeric[schema.name] = std::move(col);
        }
    }
    for (const auto& [name, mats] : panel.dyad_covariates())
        covs.dyad[name] = mats[static_cast<std::size_t>(t)];

    // lagged networks as dyad covariates, aligned by node id
    for (int k = 1; k <= panel.memory_order() && t - k >= 0; ++k) {
        const PanelPeriod& prev = panel.period(t - k);
        if (!prev.binary)
            throw Error("period '" + prev.label + "' has no binary network; apply the threshold first");
        const auto& prev_ids = prev.node_ids();
        std::vector<int> remap(n, -1);  // this period's index -> previous period's index
        for (std::size_t a = 0; a < n; ++a) {
            auto it = std::lower_bound(prev_ids.begin(), prev_ids.end(), ids[a]);
            if (it != prev_ids.end() && *it == ids[a])
                remap[a] = static_cast<int>(it - prev_ids.begin());
        }
        std::vector<double> lag(n * n, 0.0);
        for (std::size_t a = 0; a < n; ++a) {
            if (remap[a] < 0) continue;
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b || remap[b] < 0) continue;
                if (prev.binary->edge(remap[a], remap[b])) lag[a * n + b] = 1.0;
            }
        }
        covs.dyad["lag" + std::to_string(k)] = std::move(lag);
    }
    return covs;
}

DesignMatrix build_design(const PanelNetwork& panel, const ModelSpec& model, int workers) {
    model.validate();
    DesignMatrix design;
    design.term_names = model.term_names();
    const auto n_terms = design.term_names.size();

    std::vector<ChangeStatMatrix> per_period;
    long long total_rows = 0;
    for (int t : panel.modeled_periods()) {
        const PanelPeriod& p = panel.period(t);
        if (!p.binary)
            throw Error("period '" + p.label + "' has no binary network; apply the threshold first");
        Covariates covs = covariates_for_period(panel, t);
        ChangeStatMatrix csm;
        try {
            csm = change_statistics(model, *p.binary, covs, workers);
        } catch (const Error& e) {
            throw Error(std::string("period '") + p.label + "': " + e.what());
        }
        csm.period_label = p.label;
        total_rows += static_cast<long long>(csm.dyads.size());
        design.dropped_rows += csm.dropped_dyads;
        per_period.push_back(std::move(csm));
    }

    design.X.resize(total_rows, static_cast<Eigen::Index>(n_terms));
    design.y.resize(total_rows);
    long long row = 0;
    for (const auto& csm : per_period) {
        long long begin = row;
        for (std::size_t r = 0; r < csm.dyads.size(); ++r, ++row) {
            for (std::size_t c = 0; c < n_terms; ++c)
                design.X(row, static_cast<Eigen::Index>(c)) = csm.at(r, c);
            design.y(row) = csm.y[r];
        }
        design.period_labels.push_back(csm.period_label);
        design.period_rows.emplace_back(begin, row);
    }
    return design;
}

namespace {

struct Accumulated {
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    double log_pl = 0.0;
};

// One pass over the rows: blocked, block results combined in block order so
// the arithmetic is identical for every worker count.
Accumulated accumulate(const DesignMatrix& d, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& theta, int workers, bool need_hessian) {
    const auto rows = static_cast<std::int64_t>(d.X.rows());
    const int p = static_cast<int>(d.X.cols());
    std::int64_t n_blocks = (rows + kRowBlock - 1) / kRowBlock;

    std::vector<Eigen::VectorXd> grads(static_cast<std::size_t>(n_blocks));
    std::vector<Eigen::MatrixXd> hessians(need_hessian ? static_cast<std::size_t>(n_blocks) : 0);
    std::vector<double> lls(static_cast<std::size_t>(n_blocks), 0.0);

    parallel_for(n_blocks, workers, [&](std::int64_t b) {
        std::int64_t lo = b * kRowBlock;
        std::int64_t hi = std::min(rows, lo + kRowBlock);
        auto len = static_cast<Eigen::Index>(hi - lo);
        auto Xb = d.X.middleRows(static_cast<Eigen::Index>(lo), len);
        auto yb = d.y.segment(static_cast<Eigen::Index>(lo), len);
        auto wb = w.segment(static_cast<Eigen::Index>(lo), len);

        Eigen::VectorXd eta = Xb * theta;
        Eigen::VectorXd prob(len), wresid(len), curv(len);
        double ll = 0.0;
        for (Eigen::Index r = 0; r < len; ++r) {
            double pr = inverse_logit(eta(r));
            prob(r) = pr;
            wresid(r) = wb(r) * (yb(r) - pr);
            curv(r) = wb(r) * pr * (1.0 - pr);
            ll += wb(r) * (yb(r) * eta(r) - softplus(eta(r)));
        }
        lls[static_cast<std::size_t>(b)] = ll;
        grads[static_cast<std::size_t>(b)] = Xb.transpose() * wresid;
        if (need_hessian)
            hessians[static_cast<std::size_t>(b)] = Xb.transpose() * curv.asDiagonal() * Xb;
    });

    Accumulated acc;
    acc.grad = Eigen::VectorXd::Zero(p);
    if (need_hessian) acc.hess = Eigen::MatrixXd::Zero(p, p);
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        acc.log_pl += lls[static_cast<std::size_t>(b)];
        acc.grad += grads[static_cast<std::size_t>(b)];
        if (need_hessian) acc.hess += hessians[static_cast<std::size_t>(b)];
    }
    return acc;
}

double weighted_log_pl(const DesignMatrix& d, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& theta, int workers) {
    return accumulate(d, w, theta, workers, false).log_pl;
}

// Rejects collinear and constant-zero columns up front, naming the terms.
void check_columns(const DesignMatrix& d, const Eigen::VectorXd& w) {
    const int p = static_cast<int>(d.X.cols());
    std::vector<std::string> zero_columns;
    for (int c = 0; c < p; ++c) {
        double mass = 0.0;
        for (Eigen::Index r = 0; r < d.X.rows(); ++r)
            mass += w(r) * std::fabs(d.X(r, c));
        if (mass == 0.0) zero_columns.push_back(d.term_names[static_cast<std::size_t>(c)]);
    }
    if (!zero_columns.empty()) {
        std::string msg = "design has constant-zero column(s):";
        for (const auto& name : zero_columns) msg += " '" + name + "'";
        throw Error(msg);
    }

    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
    const auto rows = static_cast<std::int64_t>(d.X.rows());
    for (std::int64_t lo = 0; lo < rows; lo += kRowBlock) {
        std::int64_t hi = std::min(rows, lo + kRowBlock);
        auto len = static_cast<Eigen::Index>(hi - lo);
        auto Xb = d.X.middleRows(static_cast<Eigen::Index>(lo), len);
        auto wb = w.segment(static_cast<Eigen::Index>(lo), len);
        xtx += Xb.transpose() * wb.asDiagonal() * Xb;
    }
    // normalize to unit column scale so the rank threshold does not depend
    // on the columns' units (period polynomials vs. rare 0/1 indicators)
    Eigen::VectorXd inv_scale = xtx.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd normalized = inv_scale.asDiagonal() * xtx * inv_scale.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normalized);
    lu.setThreshold(1e-10);
    if (lu.rank() < p) {
        // columns outside the pivot set are the dependent ones
        Eigen::VectorXi pivots = lu.permutationQ().indices();
        std::string msg = "design columns are collinear:";
        for (int k = static_cast<int>(lu.rank()); k < p; ++k)
            msg += " '" + d.term_names[static_cast<std::size_t>(pivots(k))] + "'";
        throw Error(msg);
    }
}

MpleFit newton(const DesignMatrix& d, const Eigen::VectorXd& w, const MpleOptions& opt,
               double ridge) {
    const int p = static_cast<int>(d.X.cols());
    MpleFit fit;
    fit.theta = Eigen::VectorXd::Zero(p);
    fit.ridge = ridge;
    double ll = weighted_log_pl(d, w, fit.theta, opt.workers) -
                0.5 * ridge * fit.theta.squaredNorm();

    for (int it = 0; it < opt.max_iterations; ++it) {
        Accumulated acc = accumulate(d, w, fit.theta, opt.workers, true);
        Eigen::VectorXd grad = acc.grad - ridge * fit.theta;
        fit.grad_norm = grad.lpNorm<Eigen::Infinity>();
        fit.iterations = it;
        if (fit.grad_norm < opt.tolerance) {
            fit.converged = true;
            fit.log_pl = acc.log_pl;
            return fit;
        }
        Eigen::MatrixXd hess = acc.hess;
        if (ridge > 0) hess.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> solver(hess);
        Eigen::VectorXd step;
        if (solver.info() == Eigen::Success) step = solver.solve(grad);
        if (solver.info() != Eigen::Success || !step.allFinite()) {
            // curvature collapsed; treat as separation unless already ridged
            fit.separation = true;
            fit.log_pl = acc.log_pl;
            return fit;
        }

        // step-halving keeps the (penalized) pseudolikelihood increasing;
        // once the gradient is small the improvement per step drops below
        // double resolution, so the full Newton step is accepted outright
        if (fit.grad_norm < 1e-4) {
            fit.theta += step;
            ll = weighted_log_pl(d, w, fit.theta, opt.workers) -
                 0.5 * ridge * fit.theta.squaredNorm();
        } else {
            double scale = 1.0;
            bool improved = false;
            for (int h = 0; h < 40; ++h) {
                Eigen::VectorXd cand = fit.theta + scale * step;
                double cand_ll = weighted_log_pl(d, w, cand, opt.workers) -
                                 0.5 * ridge * cand.squaredNorm();
                if (cand_ll > ll) {
                    fit.theta = cand;
                    ll = cand_ll;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!improved) {
                // cannot improve in this direction: report current point
                fit.log_pl = ll;
                return fit;
            }
        }
        if (ridge == 0.0 && fit.theta.lpNorm<Eigen::Infinity>() > kThetaCap) {
            fit.separation = true;
            fit.log_pl = ll;
            return fit;
        }
    }
    fit.iterations = opt.max_iterations;
    fit.log_pl = ll;
    return fit;
}

}  // namespace

namespace {

// perfect prediction on every (weighted) row means the unpenalized MPLE
// does not exist: the likelihood approaches its supremum at infinity
bool perfectly_predicted(const DesignMatrix& d, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& theta) {
    for (Eigen::Index r = 0; r < d.X.rows(); ++r) {
        if (w(r) == 0.0) continue;
        double p = inverse_logit(d.X.row(r).dot(theta));
        if (std::fabs(d.y(r) - p) > 1e-3) return false;
    }
    return true;
}

}  // namespace

MpleFit fit_mple_weighted(const DesignMatrix& design, const Eigen::VectorXd& row_weights,
                          const MpleOptions& options) {
    if (design.X.rows() == 0) throw Error("design matrix is empty");
    if (design.X.cols() == 0) throw Error("design matrix has no terms");
    if (row_weights.size() != design.X.rows())
        throw Error("row weight vector does not match design rows");
    check_columns(design, row_weights);

    MpleFit fit = newton(design, row_weights, options, 0.0);
    if (fit.converged && perfectly_predicted(design, row_weights, fit.theta))
        fit.separation = true;
    if (!fit.separation) return fit;

    // flagged fallback: small L2 ridge makes the maximizer finite
    MpleFit ridge_fit = newton(design, row_weights, options, options.separation_ridge);
    ridge_fit.separation = true;
    return ridge_fit;
}

MpleFit fit_mple(const DesignMatrix& design, const MpleOptions& options) {
    return fit_mple_weighted(design, Eigen::VectorXd::Ones(design.X.rows()), options);
}

double log_pseudolikelihood(const DesignMatrix& design, const Eigen::VectorXd& theta) {
    return weighted_log_pl(design, Eigen::VectorXd::Ones(design.X.rows()), theta, 1);
}

Eigen::VectorXd pseudolikelihood_gradient(const DesignMatrix& design,
                                          const Eigen::VectorXd& theta) {
    return accumulate(design, Eigen::VectorXd::Ones(design.X.rows()), theta, 1, false).grad;
}

FitResult bootstrap_fit(const PanelNetwork& panel, const ModelSpec& model,
                        const BootstrapOptions& options) {
    if (options.replicates < 1) throw Error("bootstrap needs at least one replicate");
    DesignMatrix design = build_design(panel, model, options.workers);

    MpleOptions full_opts = options.mple;
    full_opts.workers = options.workers;
    MpleFit full = fit_mple(design, full_opts);

    const int B = options.replicates;
    const auto n_periods = static_cast<int>(design.period_rows.size());
    const int p = design.terms();

    // pre-draw every replicate's period multiset so scheduling cannot matter
    std::vector<std::vector<int>> draws(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(b));
        auto& multiset = draws[static_cast<std::size_t>(b)];
        multiset.assign(static_cast<std::size_t>(n_periods), 0);
        for (int k = 0; k < n_periods; ++k)
            ++multiset[static_cast<std::size_t>(rng.uniform_index(n_periods))];
    }

    FitResult result;
    result.term_names = design.term_names;
    result.theta = full.theta;
    result.iterations = full.iterations;
    result.converged = full.converged;
    result.grad_norm = full.grad_norm;
    result.log_pl = full.log_pl;
    result.separation = full.separation;
    result.ridge = full.ridge;
    result.seed = options.seed;
    result.requested_replicates = B;
    result.dropped_rows = design.dropped_rows;
    result.design_rows = design.rows();
    result.replicates.setConstant(B, p, std::numeric_limits<double>::quiet_NaN());
    result.replicate_ok.assign(static_cast<std::size_t>(B), 0);
    result.replicate_ridged.assign(static_cast<std::size_t>(B), 0);

    MpleOptions rep_opts = options.mple;
    rep_opts.workers = 1;  // parallelism is across replicates
    parallel_for(B, options.workers, [&](std::int64_t b) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(design.X.rows());
        const auto& multiset = draws[static_cast<std::size_t>(b)];
        for (int t = 0; t < n_periods; ++t) {
            if (multiset[static_cast<std::size_t>(t)] == 0) continue;
            auto [lo, hi] = design.period_rows[static_cast<std::size_t>(t)];
            w.segment(lo, hi - lo).setConstant(
                static_cast<double>(multiset[static_cast<std::size_t>(t)]));
        }
        try {
            MpleFit rep = fit_mple_weighted(design, w, rep_opts);
            if (!rep.converged && !rep.separation) return;  // failed replicate
            result.replicates.row(static_cast<Eigen::Index>(b)) = rep.theta.transpose();
            result.replicate_ok[static_cast<std::size_t>(b)] = 1;
            if (rep.separation) result.replicate_ridged[static_cast<std::size_t>(b)] = 1;
        } catch (const Error&) {
            // collinear or degenerate resample: recorded as failed
        }
    });

    int ok = 0;
    for (auto flag : result.replicate_ok) ok += flag;
    result.failed_replicates = B - ok;
    result.failure_warning = result.failed_replicates * 10 > B;
    if (ok == 0) throw Error("every bootstrap replicate failed");

    result.ci_lower.resize(p);
    result.ci_upper.resize(p);
    std::vector<double> column;
    for (int c = 0; c < p; ++c) {
        column.clear();
        for (int b = 0; b < B; ++b)
            if (result.replicate_ok[static_cast<std::size_t>(b)])
                column.push_back(result.replicates(b, c));
        auto [lo, hi] = percentile_bounds_95(std::move(column));
        result.ci_lower(c) = lo;
        result.ci_upper(c) = hi;
    }
    return result;
}

std::pair<double, double> percentile_bounds_95(std::vector<double> values) {
    if (values.empty()) throw Error("percentile bounds of an empty sample");
    std::sort(values.begin(), values.end());
    auto k = static_cast<std::size_t>(0.025 * static_cast<double>(values.size()));
    return {values[k], values[values.size() - 1 - k]};
}

double predict_tie_probability(const FitResult& fit, const Eigen::VectorXd& delta) {
    if (delta.size() != fit.theta.size())
        throw Error("delta vector length does not match the number of model terms");
    return inverse_logit(fit.theta.dot(delta));
}

}  // namespace tergm
