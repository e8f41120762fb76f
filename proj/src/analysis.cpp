#include "fairpol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fairpol {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    Rng rng = make_stream(seed, purpose);
    return rng();
}

constexpr std::uint64_t kStreamSplit = 101;
constexpr std::uint64_t kStreamAdjustTrain = 102;
constexpr std::uint64_t kStreamAdjustEval = 103;
constexpr std::uint64_t kStreamScoresTrain = 104;
constexpr std::uint64_t kStreamScoresEval = 105;
constexpr std::uint64_t kStreamPredict = 106;
constexpr std::uint64_t kStreamKmeans = 107;

}  // namespace

DataSplit DataSplit::make(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("train fraction must be in (0,1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = make_stream(seed, kStreamSplit);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_train = static_cast<std::size_t>(std::round(train_fraction * n));
    DataSplit split;
    split.train.assign(idx.begin(), idx.begin() + n_train);
    split.eval.assign(idx.begin() + n_train, idx.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.eval.begin(), split.eval.end());
    return split;
}

FeatureTable subset(const FeatureTable& table, const std::vector<std::size_t>& idx) {
    FeatureTable out;
    for (const auto& col : table.columns) {
        FeatureColumn c{col.name, col.kind, {}, col.support};
        c.values.reserve(idx.size());
        for (auto i : idx) c.values.push_back(col.values[i]);
        out.columns.push_back(std::move(c));
    }
    return out;
}

ScoreMatrix subset(const ScoreMatrix& scores, const std::vector<std::size_t>& idx) {
    ScoreMatrix out;
    out.treatment_names = scores.treatment_names;
    out.values = Matrix(idx.size(), scores.n_treatments());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t d = 0; d < scores.n_treatments(); ++d)
            out.values.at(r, d) = scores.at(idx[r], d);
    return out;
}

SensitiveVector subset(const SensitiveVector& sensitive, const std::vector<std::size_t>& idx) {
    SensitiveVector out;
    out.group_names = sensitive.group_names;
    out.labels.reserve(idx.size());
    for (auto i : idx) out.labels.push_back(sensitive.labels[i]);
    return out;
}

Assignment subset(const Assignment& assignment, const std::vector<std::size_t>& idx) {
    Assignment out;
    out.treatments.reserve(idx.size());
    for (auto i : idx) out.treatments.push_back(assignment.treatments[i]);
    return out;
}

namespace {

FeatureTable with_sensitive_column(const FeatureTable& features,
                                   const SensitiveVector& sensitive) {
    FeatureTable out = features;
    FeatureColumn col;
    col.name = "sensitive_group";
    col.kind = ColumnKind::discrete;
    col.values.reserve(sensitive.n());
    for (int s : sensitive.labels) col.values.push_back(static_cast<double>(s));
    for (int s = 0; s < sensitive.k(); ++s) col.support.push_back(static_cast<double>(s));
    out.columns.push_back(std::move(col));
    return out;
}

}  // namespace

std::vector<double> winners_losers(const Assignment& policy_a, const Assignment& policy_b,
                                   const ScoreMatrix& scores) {
    if (policy_a.n() != policy_b.n() || policy_a.n() != scores.n())
        throw std::invalid_argument("winners_losers length mismatch");
    std::vector<double> delta(scores.n());
    for (std::size_t i = 0; i < scores.n(); ++i)
        delta[i] = scores.at(i, policy_b.treatments[i]) - scores.at(i, policy_a.treatments[i]);
    return delta;
}

ComparisonResult run_comparison(const Dataset& data, const AnalysisConfig& config,
                                const DataSplit& split) {
    ComparisonResult result;
    const auto& idx_t = split.train;
    const auto& idx_e = split.eval;
    const FeatureTable feat_t = subset(data.features, idx_t);
    const FeatureTable feat_e = subset(data.features, idx_e);
    const ScoreMatrix scores_t = subset(data.scores, idx_t);
    const ScoreMatrix scores_e = subset(data.scores, idx_e);
    const SensitiveVector sens_t = subset(data.sensitive, idx_t);
    const SensitiveVector sens_e = subset(data.sensitive, idx_e);

    auto add_row = [&](const std::string& name, bool interpretable,
                       const Assignment& assignment) {
        ComparisonRow row;
        row.policy = name;
        row.interpretable = interpretable;
        row.eval.policy_value = policy_value(assignment, scores_e);
        row.eval.program_shares = program_shares(assignment, scores_e.n_treatments());
        row.eval.fairness = fairness_report(
            contingency(assignment, sens_e, scores_e.n_treatments()), config.prior_concentration);
        result.rows.push_back(std::move(row));
    };

    // benchmark policies
    if (data.observed) {
        add_row("observed", false, subset(*data.observed, idx_e));
    } else {
        result.notes.push_back("observed assignment missing; Observed row omitted");
    }
    add_row("blackbox", false, blackbox_policy(scores_e));

    const CdfModel score_model = CdfModel::fit_scores(scores_t, sens_t);
    const ScoreMatrix scores_t_adj = apply_cdf_model_scores(
        score_model, scores_t, sens_t, derive_seed(config.seed, kStreamScoresTrain));
    const ScoreMatrix scores_e_adj = apply_cdf_model_scores(
        score_model, scores_e, sens_e, derive_seed(config.seed, kStreamScoresEval));
    add_row("blackbox_fair", false, blackbox_policy(scores_e_adj));

    const int all_in_one = all_in_one_policy(scores_t).second;
    Assignment all_in_one_e;
    all_in_one_e.treatments.assign(idx_e.size(), all_in_one);
    add_row("all_in_one", true, all_in_one_e);

    // policy trees
    const FeatureTable feat_t_s = with_sensitive_column(feat_t, sens_t);
    const FeatureTable feat_e_s = with_sensitive_column(feat_e, sens_e);
    const PolicyTree tree_incl_s = fit_tree(feat_t_s, scores_t, config.depth,
                                            enumerate_candidates(feat_t_s, config.n_points));
    add_row("tree_unadjusted_incl_s", true, predict_tree(tree_incl_s, feat_e_s));

    result.tree_excl_s = fit_tree(feat_t, scores_t, config.depth,
                                  enumerate_candidates(feat_t, config.n_points));
    result.assign_excl_s = predict_tree(result.tree_excl_s, feat_e);
    add_row("tree_unadjusted_excl_s", true, result.assign_excl_s);

    const CdfModel feat_model = CdfModel::fit(feat_t, sens_t);
    const AdjustedFeatures adj_t = apply_cdf_model(feat_model, feat_t, sens_t,
                                                   derive_seed(config.seed, kStreamAdjustTrain));
    const AdjustedFeatures adj_e = apply_cdf_model(feat_model, feat_e, sens_e,
                                                   derive_seed(config.seed, kStreamAdjustEval));
    const FeatureTable cdf_t = adj_t.cdf_scale_table();
    const FeatureTable cdf_e = adj_e.cdf_scale_table();
    const SplitCandidates cdf_cands = enumerate_candidates(cdf_t, config.n_points);

    result.tree_adjust_a = fit_tree(cdf_t, scores_t, config.depth, cdf_cands, TreeScale::cdf);
    add_row("tree_adjust_a", false, predict_tree(result.tree_adjust_a, cdf_e));

    const PolicyTree tree_adj_scores = fit_tree(feat_t, scores_t_adj, config.depth,
                                                enumerate_candidates(feat_t, config.n_points));
    add_row("tree_adjust_scores", true, predict_tree(tree_adj_scores, feat_e));

    result.tree_adjust_both =
        fit_tree(cdf_t, scores_t_adj, config.depth, cdf_cands, TreeScale::cdf);
    add_row("tree_adjust_both", false, predict_tree(result.tree_adjust_both, cdf_e));

    // probabilistic split trees
    const std::uint64_t predict_seed = derive_seed(config.seed, kStreamPredict);
    result.pst_adjust_a = transform(result.tree_adjust_a, adj_t, feat_t, sens_t);
    add_row("pst_adjust_a", true, predict_prob(result.pst_adjust_a, feat_e, sens_e, predict_seed));

    result.pst_adjust_both = transform(result.tree_adjust_both, adj_t, feat_t, sens_t);
    result.assign_pst_both = predict_prob(result.pst_adjust_both, feat_e, sens_e, predict_seed + 1);
    add_row("pst_adjust_both", true, result.assign_pst_both);

    return result;
}

std::vector<SweepPoint> partial_sweep(const Dataset& data, const AnalysisConfig& config,
                                      const DataSplit& split,
                                      const std::vector<AdjustTarget>& targets) {
    std::vector<SweepPoint> points;
    const FeatureTable feat_t = subset(data.features, split.train);
    const FeatureTable feat_e = subset(data.features, split.eval);
    const ScoreMatrix scores_t = subset(data.scores, split.train);
    const ScoreMatrix scores_e = subset(data.scores, split.eval);
    const SensitiveVector sens_t = subset(data.sensitive, split.train);
    const SensitiveVector sens_e = subset(data.sensitive, split.eval);

    const CdfModel feat_model = CdfModel::fit(feat_t, sens_t);
    const AdjustedFeatures adj_t = apply_cdf_model(feat_model, feat_t, sens_t,
                                                   derive_seed(config.seed, kStreamAdjustTrain));
    const AdjustedFeatures adj_e = apply_cdf_model(feat_model, feat_e, sens_e,
                                                   derive_seed(config.seed, kStreamAdjustEval));
    const CdfModel score_model = CdfModel::fit_scores(scores_t, sens_t);
    const ScoreMatrix scores_t_adj = apply_cdf_model_scores(
        score_model, scores_t, sens_t, derive_seed(config.seed, kStreamScoresTrain));
    const FeatureTable cdf_t = adj_t.cdf_scale_table();
    const FeatureTable cdf_e = adj_e.cdf_scale_table();

    for (AdjustTarget target : targets) {
        for (double lambda : config.lambdas) {
            const bool blend_a =
                target == AdjustTarget::features || target == AdjustTarget::both;
            const bool blend_g = target == AdjustTarget::scores || target == AdjustTarget::both;
            // at the endpoints, reuse the comparison table's exact fit scales so
            // the sweep reproduces those rows identically
            const FeatureTable& fit_feat =
                !blend_a || lambda == 0.0 ? feat_t
                : lambda == 1.0           ? cdf_t
                                          : blend_features(feat_t, adj_t, lambda);
            const FeatureTable& eval_feat =
                !blend_a || lambda == 0.0 ? feat_e
                : lambda == 1.0           ? cdf_e
                                          : blend_features(feat_e, adj_e, lambda);
            const ScoreMatrix fit_scores_m =
                blend_g ? blend_scores(scores_t, scores_t_adj, lambda) : scores_t;
            const PolicyTree tree =
                fit_tree(fit_feat, fit_scores_m, config.depth,
                         enumerate_candidates(fit_feat, config.n_points),
                         blend_a && lambda == 1.0 ? TreeScale::cdf : TreeScale::raw);
            const Assignment assignment = predict_tree(tree, eval_feat);
            SweepPoint point;
            point.target = target;
            point.lambda = lambda;
            point.policy_value = policy_value(assignment, scores_e);
            point.cramers_v =
                cramers_v(contingency(assignment, sens_e, scores_e.n_treatments())).cramers_v;
            points.push_back(point);
        }
    }
    return points;
}

namespace {

struct KmeansFit {
    std::vector<double> centers;
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

KmeansFit kmeans_1d(const std::vector<double>& x, int k, int restarts, Rng& rng) {
    KmeansFit best;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n = x.size();
    for (int r = 0; r < restarts; ++r) {
        // k-means++ seeding
        std::vector<double> centers;
        centers.push_back(x[static_cast<std::size_t>(unif(rng) * n) % n]);
        std::vector<double> d2(n);
        while (static_cast<int>(centers.size()) < k) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double nearest = std::numeric_limits<double>::infinity();
                for (double c : centers) nearest = std::min(nearest, (x[i] - c) * (x[i] - c));
                d2[i] = nearest;
                total += nearest;
            }
            if (total == 0.0) {
                centers.push_back(x[0]);
                continue;
            }
            double pick = unif(rng) * total;
            std::size_t chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                pick -= d2[i];
                if (pick <= 0.0) {
                    chosen = i;
                    break;
                }
            }
            centers.push_back(x[chosen]);
        }

        std::vector<int> labels(n, 0);
        for (int iter = 0; iter < 300; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                int bestc = 0;
                double bestd = std::fabs(x[i] - centers[0]);
                for (int c = 1; c < k; ++c) {
                    const double d = std::fabs(x[i] - centers[c]);
                    if (d < bestd) {
                        bestd = d;
                        bestc = c;
                    }
                }
                if (labels[i] != bestc) {
                    labels[i] = bestc;
                    changed = true;
                }
            }
            std::vector<double> sum(k, 0.0);
            std::vector<std::size_t> cnt(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                sum[labels[i]] += x[i];
                ++cnt[labels[i]];
            }
            for (int c = 0; c < k; ++c)
                if (cnt[c] > 0) centers[c] = sum[c] / static_cast<double>(cnt[c]);
            if (!changed && iter > 0) break;
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += (x[i] - centers[labels[i]]) * (x[i] - centers[labels[i]]);
        if (inertia < best.inertia) {
            best.centers = centers;
            best.labels = labels;
            best.inertia = inertia;
        }
    }
    return best;
}

// Exact mean silhouette for 1-D data via per-cluster sorted prefix sums.
double silhouette_1d(const std::vector<double>& x, const std::vector<int>& labels, int k) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> sorted(k);
    for (std::size_t i = 0; i < n; ++i) sorted[labels[i]].push_back(x[i]);
    std::vector<std::vector<double>> prefix(k);
    for (int c = 0; c < k; ++c) {
        std::sort(sorted[c].begin(), sorted[c].end());
        prefix[c].resize(sorted[c].size() + 1, 0.0);
        for (std::size_t i = 0; i < sorted[c].size(); ++i)
            prefix[c][i + 1] = prefix[c][i] + sorted[c][i];
    }
    auto sum_abs_dist = [&](double v, int c) {
        const auto& s = sorted[c];
        const auto& p = prefix[c];
        const std::size_t le =
            static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), v) - s.begin());
        const double below = v * static_cast<double>(le) - p[le];
        const double above = (p.back() - p[le]) - v * static_cast<double>(s.size() - le);
        return below + above;
    };
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int c = labels[i];
        const std::size_t sz = sorted[c].size();
        if (sz <= 1) continue;  // silhouette of singletons is 0
        const double a = sum_abs_dist(x[i], c) / static_cast<double>(sz - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int other = 0; other < k; ++other) {
            if (other == c || sorted[other].empty()) continue;
            b = std::min(b, sum_abs_dist(x[i], other) /
                                static_cast<double>(sorted[other].size()));
        }
        if (std::isinf(b)) continue;
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(n);
}

}  // namespace

ClusterSummary kmeans_cluster(const std::vector<double>& delta, const FeatureTable& covariates,
                              const std::vector<int>& k_range, double min_share,
                              std::uint64_t seed) {
    if (min_share <= 0.0 || min_share >= 0.5)
        throw std::invalid_argument("min_share must be in (0, 0.5)");
    for (int k : k_range)
        if (k < 2 || k > 10) throw std::invalid_argument("k_range must lie in {2..10}");
    const std::size_t n = delta.size();

    // standardize the clustering variable
    double mean = 0.0;
    for (double d : delta) mean += d;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double d : delta) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);

    ClusterSummary summary;
    summary.feature_names = covariates.names();

    auto fill_clusters = [&](const std::vector<int>& labels, int k) {
        std::vector<ClusterSummary::Cluster> clusters(k);
        for (auto& c : clusters) c.feature_means.assign(covariates.n_features(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = clusters[labels[i]];
            c.mean_delta += delta[i];
            ++c.size;
            for (std::size_t j = 0; j < covariates.n_features(); ++j)
                c.feature_means[j] += covariates.columns[j].values[i];
        }
        for (auto& c : clusters) {
            if (c.size == 0) continue;
            c.mean_delta /= static_cast<double>(c.size);
            for (auto& m : c.feature_means) m /= static_cast<double>(c.size);
        }
        clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                      [](const auto& c) { return c.size == 0; }),
                       clusters.end());
        std::sort(clusters.begin(), clusters.end(),
                  [](const auto& a, const auto& b) { return a.mean_delta < b.mean_delta; });
        return clusters;
    };

    if (sd == 0.0) {
        // degenerate: everything identical, single cluster
        summary.k = 1;
        summary.fallback = true;
        std::vector<int> labels(n, 0);
        summary.clusters = fill_clusters(labels, 1);
        return summary;
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (delta[i] - mean) / sd;

    struct Candidate {
        int k;
        double silhouette;
        bool feasible;
        std::vector<int> labels;
    };
    std::vector<Candidate> candidates;
    Rng rng = make_stream(seed, kStreamKmeans);
    for (int k : k_range) {
        KmeansFit fit = kmeans_1d(x, k, 10, rng);
        std::vector<std::size_t> sizes(k, 0);
        for (int l : fit.labels) ++sizes[l];
        bool feasible = true;
        for (auto s : sizes)
            if (static_cast<double>(s) < min_share * static_cast<double>(n)) feasible = false;
        candidates.push_back(
            {k, silhouette_1d(x, fit.labels, k), feasible, std::move(fit.labels)});
    }

    const Candidate* chosen = nullptr;
    for (const auto& c : candidates)
        if (c.feasible && (!chosen || c.silhouette > chosen->silhouette)) chosen = &c;
    if (!chosen) {
        summary.fallback = true;
        for (const auto& c : candidates)
            if (!chosen || c.silhouette > chosen->silhouette) chosen = &c;
    }
    summary.k = chosen->k;
    summary.silhouette = chosen->silhouette;
    summary.clusters = fill_clusters(chosen->labels, chosen->k);
    return summary;
}

std::string to_string(AdjustTarget target) {
    switch (target) {
        case AdjustTarget::features: return "A";
        case AdjustTarget::scores: return "scores";
        case AdjustTarget::both: return "both";
    }
    return "?";
}

}  // namespace fairpol
