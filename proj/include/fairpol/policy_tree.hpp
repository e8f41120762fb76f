#pragma once

#include "fairpol/data_model.hpp"

namespace fairpol {

enum class TreeScale { raw, cdf };

struct PolicyNode {
    int feature = -1;       // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int treatment = -1;     // leaves only

    bool is_leaf() const { return feature < 0; }
};

struct PolicyTree {
    std::vector<PolicyNode> nodes;  // nodes[0] is the root
    TreeScale scale = TreeScale::raw;
    std::vector<std::string> feature_names;
    int max_depth = 0;
    double train_value = 0.0;  // mean score of the fitted assignment on training rows

    int depth() const;
};

struct SplitCandidates {
    std::vector<std::vector<double>> thresholds;  // per feature, strictly increasing
};

// Continuous: quantile grid k/(n_points+1), deduplicated; discrete: midpoints
// between consecutive support values. Thresholds that cannot split are dropped.
std::vector<double> enumerate_candidates(const std::vector<double>& column, ColumnKind kind,
                                         int n_points);

SplitCandidates enumerate_candidates(const FeatureTable& features, int n_points);

// Globally optimal tree of at most the given depth over the candidate grid.
// Ties resolved by (shallower, lower feature, lower threshold, lower treatment).
PolicyTree fit_tree(const FeatureTable& features, const ScoreMatrix& scores, int depth,
                    const SplitCandidates& candidates, TreeScale scale = TreeScale::raw);

// Routing convention: value <= threshold goes left.
Assignment predict_tree(const PolicyTree& tree, const FeatureTable& features);

std::string render_tree(const PolicyTree& tree);

std::string tree_to_json(const PolicyTree& tree);
PolicyTree tree_from_json(const std::string& json_text);

}  // namespace fairpol
