#pragma once

#include "fairpol/fair_adjust.hpp"
#include "fairpol/policy_tree.hpp"

namespace fairpol {

struct ProbSplitNode {
    int feature = -1;
    double threshold = 0.0;   // g(p, s), original scale
    double p_tilde = 1.0;     // share of threshold-equal units routed left
    bool strict = false;      // true: "< g" plus randomized ties; false: "<= g"
    int left = -1;
    int right = -1;
    int treatment = -1;

    bool is_leaf() const { return feature < 0; }
};

struct GroupTree {
    std::vector<ProbSplitNode> nodes;
};

// Group-specific raw-scale translation of a cdf-scale tree.
struct ProbSplitPolicy {
    std::vector<GroupTree> group_trees;  // one per sensitive group
    PolicyTree source;                   // the originating cdf-scale tree
    std::vector<std::string> feature_names;
    std::vector<std::string> group_names;
    std::uint64_t seed = 0;
};

// Translates each cdf-scale node into per-group raw thresholds via cq_lookup
// and per-node left shares over the training rows routed to the node.
ProbSplitPolicy transform(const PolicyTree& tree_cdf, const AdjustedFeatures& adjusted,
                          const FeatureTable& features, const SensitiveVector& sensitive);

// Rows strictly below g go left, above go right; ties go left with prob p_tilde.
// Row i consumes stream (seed, i).
Assignment predict_prob(const ProbSplitPolicy& policy, const FeatureTable& features,
                        const SensitiveVector& sensitive, std::uint64_t seed);

// Single rendering tree whose top level enumerates the sensitive groups.
std::string condense(const ProbSplitPolicy& policy,
                     const std::vector<std::string>& treatment_names);

std::string prob_policy_to_json(const ProbSplitPolicy& policy);
ProbSplitPolicy prob_policy_from_json(const std::string& json_text);

}  // namespace fairpol
