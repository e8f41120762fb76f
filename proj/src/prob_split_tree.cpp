#include "fairpol/prob_split_tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fairpol {

namespace {

// Observation-level (value, p) pairs per (group, feature), sorted by p.
std::vector<std::vector<CqPairs>> build_pairs(const AdjustedFeatures& adjusted,
                                              const FeatureTable& features,
                                              const SensitiveVector& sensitive) {
    const auto group_idx = sensitive.group_indices();
    std::vector<std::vector<CqPairs>> pairs(sensitive.k());
    for (int s = 0; s < sensitive.k(); ++s) {
        pairs[s].resize(features.n_features());
        for (std::size_t j = 0; j < features.n_features(); ++j) {
            auto& pj = pairs[s][j];
            std::vector<std::size_t> order = group_idx[s];
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return adjusted.p_values.at(a, j) < adjusted.p_values.at(b, j);
            });
            for (auto i : order) {
                pj.ps.push_back(adjusted.p_values.at(i, j));
                pj.values.push_back(features.columns[j].values[i]);
            }
        }
    }
    return pairs;
}

}  // namespace

ProbSplitPolicy transform(const PolicyTree& tree_cdf, const AdjustedFeatures& adjusted,
                          const FeatureTable& features, const SensitiveVector& sensitive) {
    if (tree_cdf.scale != TreeScale::cdf)
        throw std::invalid_argument("transform expects a cdf-scale tree");
    if (adjusted.n() != features.n() || adjusted.n() != sensitive.n())
        throw std::invalid_argument("transform input length mismatch");

    const auto pairs = build_pairs(adjusted, features, sensitive);

    // Route training rows through the cdf-scale tree to get per-node index sets.
    const FeatureTable cdf_table = adjusted.cdf_scale_table();
    std::vector<std::vector<std::size_t>> node_rows(tree_cdf.nodes.size());
    for (std::size_t i = 0; i < adjusted.n(); ++i) {
        int idx = 0;
        while (true) {
            node_rows[idx].push_back(i);
            const PolicyNode& node = tree_cdf.nodes[idx];
            if (node.is_leaf()) break;
            idx = cdf_table.columns[node.feature].values[i] <= node.threshold ? node.left
                                                                              : node.right;
        }
    }

    ProbSplitPolicy policy;
    policy.source = tree_cdf;
    policy.feature_names = tree_cdf.feature_names;
    policy.group_names = sensitive.group_names;
    policy.seed = adjusted.rng_seed;
    policy.group_trees.resize(sensitive.k());

    for (int s = 0; s < sensitive.k(); ++s) {
        GroupTree& gt = policy.group_trees[s];
        gt.nodes.resize(tree_cdf.nodes.size());
        for (std::size_t l = 0; l < tree_cdf.nodes.size(); ++l) {
            const PolicyNode& src = tree_cdf.nodes[l];
            ProbSplitNode& dst = gt.nodes[l];
            if (src.is_leaf()) {
                dst.treatment = src.treatment;
                continue;
            }
            const int j = src.feature;
            const double p = src.threshold;
            const double g = cq_lookup(p, pairs[s][j]);
            // share of threshold-equal units in this node and group with p_ij <= p
            std::size_t n_eq = 0, n_left = 0;
            for (auto i : node_rows[l]) {
                if (sensitive.labels[i] != s) continue;
                if (features.columns[j].values[i] != g) continue;
                ++n_eq;
                if (adjusted.p_values.at(i, j) <= p) ++n_left;
            }
            const double p_tilde =
                n_eq == 0 ? 1.0 : static_cast<double>(n_left) / static_cast<double>(n_eq);
            dst.feature = j;
            dst.left = src.left;
            dst.right = src.right;
            if (p_tilde == 1.0) {
                dst.p_tilde = 1.0;
                dst.strict = false;
                dst.threshold = features.columns[j].kind == ColumnKind::discrete
                                    ? std::floor(g)
                                    : g;
            } else {
                dst.p_tilde = p_tilde;
                dst.strict = true;
                dst.threshold = g;
            }
        }
    }
    return policy;
}

Assignment predict_prob(const ProbSplitPolicy& policy, const FeatureTable& features,
                        const SensitiveVector& sensitive, std::uint64_t seed) {
    Assignment out;
    out.treatments.resize(features.n());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < features.n(); ++i) {
        const GroupTree& gt = policy.group_trees[sensitive.labels[i]];
        Rng rng = make_stream(seed, i);
        int idx = 0;
        while (!gt.nodes[idx].is_leaf()) {
            const ProbSplitNode& node = gt.nodes[idx];
            const double v = features.columns[node.feature].values[i];
            bool go_left;
            if (node.strict) {
                if (v < node.threshold)
                    go_left = true;
                else if (v > node.threshold)
                    go_left = false;
                else
                    go_left = unif(rng) < node.p_tilde;
            } else {
                go_left = v <= node.threshold;
            }
            idx = go_left ? node.left : node.right;
        }
        out.treatments[i] = gt.nodes[idx].treatment;
    }
    return out;
}

namespace {

void render_group_node(const GroupTree& gt, const std::vector<std::string>& feature_names,
                       const std::vector<std::string>& treatment_names, int idx, int indent,
                       std::ostringstream& os) {
    const ProbSplitNode& node = gt.nodes[idx];
    const std::string pad(2 * indent, ' ');
    if (node.is_leaf()) {
        const std::string name = node.treatment < static_cast<int>(treatment_names.size())
                                     ? treatment_names[node.treatment]
                                     : std::to_string(node.treatment);
        os << pad << "-> " << name << "\n";
        return;
    }
    const std::string& f = feature_names[node.feature];
    if (node.strict) {
        os << pad << f << " < " << node.threshold << " (ties " << std::fixed
           << std::setprecision(1) << 100.0 * node.p_tilde << "% left)" << std::defaultfloat
           << ":\n";
    } else {
        os << pad << f << " <= " << node.threshold << ":\n";
    }
    render_group_node(gt, feature_names, treatment_names, node.left, indent + 1, os);
    os << pad << "else:\n";
    render_group_node(gt, feature_names, treatment_names, node.right, indent + 1, os);
}

}  // namespace

std::string condense(const ProbSplitPolicy& policy,
                     const std::vector<std::string>& treatment_names) {
    std::ostringstream os;
    os.precision(10);
    for (std::size_t s = 0; s < policy.group_trees.size(); ++s) {
        os << "group " << policy.group_names[s] << ":\n";
        render_group_node(policy.group_trees[s], policy.feature_names, treatment_names, 0, 1, os);
    }
    return os.str();
}

std::string prob_policy_to_json(const ProbSplitPolicy& policy) {
    nlohmann::json j;
    j["seed"] = policy.seed;
    j["feature_names"] = policy.feature_names;
    j["group_names"] = policy.group_names;
    j["source"] = nlohmann::json::parse(tree_to_json(policy.source));
    auto& groups = j["group_trees"] = nlohmann::json::array();
    for (const auto& gt : policy.group_trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : gt.nodes) {
            nodes.push_back({{"feature", node.feature},
                             {"threshold", node.threshold},
                             {"p_tilde", node.p_tilde},
                             {"strict", node.strict},
                             {"left", node.left},
                             {"right", node.right},
                             {"treatment", node.treatment}});
        }
        groups.push_back(std::move(nodes));
    }
    return j.dump(2);
}

ProbSplitPolicy prob_policy_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    ProbSplitPolicy policy;
    policy.seed = j["seed"].get<std::uint64_t>();
    policy.feature_names = j["feature_names"].get<std::vector<std::string>>();
    policy.group_names = j["group_names"].get<std::vector<std::string>>();
    policy.source = tree_from_json(j["source"].dump());
    for (const auto& nodes : j["group_trees"]) {
        GroupTree gt;
        for (const auto& nj : nodes) {
            ProbSplitNode node;
            node.feature = nj["feature"].get<int>();
            node.threshold = nj["threshold"].get<double>();
            node.p_tilde = nj["p_tilde"].get<double>();
            node.strict = nj["strict"].get<bool>();
            node.left = nj["left"].get<int>();
            node.right = nj["right"].get<int>();
            node.treatment = nj["treatment"].get<int>();
            gt.nodes.push_back(node);
        }
        policy.group_trees.push_back(std::move(gt));
    }
    return policy;
}

}  // namespace fairpol
