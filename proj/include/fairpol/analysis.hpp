#pragma once

#include "fairpol/fair_adjust.hpp"
#include "fairpol/policy_tree.hpp"
#include "fairpol/prob_split_tree.hpp"
#include "fairpol/scores.hpp"

#include <optional>

namespace fairpol {

struct Dataset {
    FeatureTable features;
    SensitiveVector sensitive;
    ScoreMatrix scores;
    std::optional<Assignment> observed;
};

struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> eval;

    static DataSplit make(std::size_t n, double train_fraction, std::uint64_t seed);
};

struct AnalysisConfig {
    int depth = 3;
    int n_points = 100;
    std::uint64_t seed = 42;
    double train_fraction = 2.0 / 3.0;
    std::vector<double> lambdas;
    double prior_concentration = 1.0;
};

struct ComparisonRow {
    std::string policy;
    bool interpretable = false;
    PolicyEvalReport eval;
};

enum class AdjustTarget { features, scores, both };

struct SweepPoint {
    AdjustTarget target;
    double lambda = 0.0;
    double policy_value = 0.0;
    double cramers_v = 0.0;
};

struct ClusterSummary {
    struct Cluster {
        double mean_delta = 0.0;
        std::size_t size = 0;
        std::vector<double> feature_means;
    };
    int k = 0;
    double silhouette = 0.0;
    bool fallback = false;  // no k satisfied the minimum-share constraint
    std::vector<Cluster> clusters;  // sorted ascending by mean_delta
    std::vector<std::string> feature_names;
};

// Full-pipeline artifacts kept around so callers can render trees or reuse
// the fitted policies without re-running the comparison.
struct ComparisonResult {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> notes;
    PolicyTree tree_excl_s;       // fairness-unaware reference for clustering
    PolicyTree tree_adjust_a;     // cdf scale
    PolicyTree tree_adjust_both;  // cdf scale
    ProbSplitPolicy pst_adjust_a;
    ProbSplitPolicy pst_adjust_both;
    Assignment assign_excl_s;       // on the eval split
    Assignment assign_pst_both;     // on the eval split
};

FeatureTable subset(const FeatureTable& table, const std::vector<std::size_t>& idx);
ScoreMatrix subset(const ScoreMatrix& scores, const std::vector<std::size_t>& idx);
SensitiveVector subset(const SensitiveVector& sensitive, const std::vector<std::size_t>& idx);
Assignment subset(const Assignment& assignment, const std::vector<std::size_t>& idx);

// Benchmark and tree policies of the comparison table; statistics on the eval split.
ComparisonResult run_comparison(const Dataset& data, const AnalysisConfig& config,
                                const DataSplit& split);

std::vector<SweepPoint> partial_sweep(const Dataset& data, const AnalysisConfig& config,
                                      const DataSplit& split,
                                      const std::vector<AdjustTarget>& targets);

// Per-row score difference of policy b over policy a.
std::vector<double> winners_losers(const Assignment& policy_a, const Assignment& policy_b,
                                   const ScoreMatrix& scores);

ClusterSummary kmeans_cluster(const std::vector<double>& delta, const FeatureTable& covariates,
                              const std::vector<int>& k_range, double min_share,
                              std::uint64_t seed);

std::string to_string(AdjustTarget target);

}  // namespace fairpol
