#include "fairpol/policy_tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fairpol {

int PolicyTree::depth() const {
    if (nodes.empty()) return 0;
    // iterative depth over the index-based tree
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int depth = 0;
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        depth = std::max(depth, d);
        const PolicyNode& node = nodes[idx];
        if (!node.is_leaf()) {
            stack.push_back({node.left, d + 1});
            stack.push_back({node.right, d + 1});
        }
    }
    return depth;
}

std::vector<double> enumerate_candidates(const std::vector<double>& column, ColumnKind kind,
                                         int n_points) {
    if (n_points < 1) throw std::invalid_argument("n_points must be >= 1");
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> thresholds;
    if (kind == ColumnKind::discrete) {
        std::vector<double> distinct = sorted;
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
            thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    } else {
        const std::size_t n = sorted.size();
        for (int k = 1; k <= n_points; ++k) {
            const double q = static_cast<double>(k) / static_cast<double>(n_points + 1);
            const double c = 1.0 + static_cast<double>(n - 1) * q;
            const std::size_t lambda = static_cast<std::size_t>(std::floor(c));
            const double kappa = c - static_cast<double>(lambda);
            const double t = lambda >= n ? sorted[n - 1]
                                         : (1.0 - kappa) * sorted[lambda - 1] + kappa * sorted[lambda];
            thresholds.push_back(t);
        }
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    }
    // keep only thresholds that actually split the column
    std::vector<double> out;
    for (double t : thresholds)
        if (sorted.front() <= t && sorted.back() > t) out.push_back(t);
    return out;
}

SplitCandidates enumerate_candidates(const FeatureTable& features, int n_points) {
    SplitCandidates cands;
    for (const auto& col : features.columns)
        cands.thresholds.push_back(enumerate_candidates(col.values, col.kind, n_points));
    return cands;
}

namespace {

struct BuiltTree {
    double value = 0.0;  // sum of scores, not mean
    int depth = 0;
    PolicyNode node;
    std::vector<BuiltTree> children;  // empty for leaves, else {left, right}
};

class TreeSearch {
  public:
    TreeSearch(const FeatureTable& features, const ScoreMatrix& scores,
               const SplitCandidates& candidates)
        : scores_(scores), candidates_(candidates) {
        const std::size_t n = features.n();
        const std::size_t f = features.n_features();
        buckets_.assign(f, std::vector<int>(n));
        for (std::size_t j = 0; j < f; ++j) {
            const auto& th = candidates.thresholds[j];
            for (std::size_t i = 0; i < n; ++i) {
                // row goes left at candidate k iff value <= th[k], i.e. k >= bucket
                buckets_[j][i] = static_cast<int>(
                    std::lower_bound(th.begin(), th.end(), features.columns[j].values[i]) -
                    th.begin());
            }
        }
    }

    BuiltTree solve(const std::vector<int>& rows, int depth) const {
        BuiltTree best = best_leaf(rows);
        if (depth == 0 || rows.empty()) return best;
        for (std::size_t j = 0; j < buckets_.size(); ++j) {
            const auto& th = candidates_.thresholds[j];
            if (th.empty()) continue;
            if (depth == 1) {
                search_depth1(rows, j, best);
                continue;
            }
            // sort rows by bucket, evaluate each distinct boundary once
            std::vector<int> order = rows;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return buckets_[j][a] < buckets_[j][b]; });
            std::size_t i = 0;
            while (i < order.size()) {
                const int b = buckets_[j][order[i]];
                std::size_t e = i;
                while (e < order.size() && buckets_[j][order[e]] == b) ++e;
                if (e == order.size() || b >= static_cast<int>(th.size())) break;
                const std::vector<int> left(order.begin(), order.begin() + e);
                const std::vector<int> right(order.begin() + e, order.end());
                BuiltTree lt = solve(left, depth - 1);
                BuiltTree rt = solve(right, depth - 1);
                const double value = lt.value + rt.value;
                const int d = 1 + std::max(lt.depth, rt.depth);
                if (value > best.value || (value == best.value && d < best.depth)) {
                    best.value = value;
                    best.depth = d;
                    best.node = PolicyNode{static_cast<int>(j), th[b], 0, 0, -1};
                    best.children.clear();
                    best.children.push_back(std::move(lt));
                    best.children.push_back(std::move(rt));
                }
                i = e;
            }
        }
        return best;
    }

    BuiltTree best_leaf(const std::vector<int>& rows) const {
        const std::size_t m = scores_.n_treatments();
        std::vector<double> sums(m, 0.0);
        for (int i : rows)
            for (std::size_t d = 0; d < m; ++d) sums[d] += scores_.at(i, d);
        int best = 0;
        for (std::size_t d = 1; d < m; ++d)
            if (sums[d] > sums[best]) best = static_cast<int>(d);
        BuiltTree leaf;
        leaf.value = sums[best];
        leaf.depth = 0;
        leaf.node = PolicyNode{-1, 0.0, -1, -1, best};
        return leaf;
    }

  private:
    // Histogram sweep over the candidate grid: O(rows + T*M) per feature.
    void search_depth1(const std::vector<int>& rows, std::size_t j, BuiltTree& best) const {
        const auto& th = candidates_.thresholds[j];
        const std::size_t t = th.size();
        const std::size_t m = scores_.n_treatments();
        std::vector<double> hist((t + 1) * m, 0.0);
        std::vector<int> cnt(t + 1, 0);
        std::vector<double> total(m, 0.0);
        for (int i : rows) {
            const int b = buckets_[j][i];
            ++cnt[b];
            for (std::size_t d = 0; d < m; ++d) {
                hist[b * m + d] += scores_.at(i, d);
                total[d] += scores_.at(i, d);
            }
        }
        std::vector<double> left(m, 0.0);
        int left_cnt = 0;
        for (std::size_t k = 0; k < t; ++k) {
            left_cnt += cnt[k];
            for (std::size_t d = 0; d < m; ++d) left[d] += hist[k * m + d];
            if (left_cnt == 0 || left_cnt == static_cast<int>(rows.size())) continue;
            int bl = 0, br = 0;
            for (std::size_t d = 1; d < m; ++d) {
                if (left[d] > left[bl]) bl = static_cast<int>(d);
                if (total[d] - left[d] > total[br] - left[br]) br = static_cast<int>(d);
            }
            const double value = left[bl] + (total[br] - left[br]);
            if (value > best.value || (value == best.value && 1 < best.depth)) {
                best.value = value;
                best.depth = 1;
                best.node = PolicyNode{static_cast<int>(j), th[k], 0, 0, -1};
                best.children.clear();
                BuiltTree lt, rt;
                lt.value = left[bl];
                lt.node = PolicyNode{-1, 0.0, -1, -1, bl};
                rt.value = total[br] - left[br];
                rt.node = PolicyNode{-1, 0.0, -1, -1, br};
                best.children.push_back(std::move(lt));
                best.children.push_back(std::move(rt));
            }
        }
    }

    const ScoreMatrix& scores_;
    const SplitCandidates& candidates_;
    std::vector<std::vector<int>> buckets_;  // per feature, per row
};

int flatten(const BuiltTree& built, std::vector<PolicyNode>& nodes) {
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back(built.node);
    if (!built.children.empty()) {
        nodes[idx].left = flatten(built.children[0], nodes);
        nodes[idx].right = flatten(built.children[1], nodes);
    }
    return idx;
}

}  // namespace

PolicyTree fit_tree(const FeatureTable& features, const ScoreMatrix& scores, int depth,
                    const SplitCandidates& candidates, TreeScale scale) {
    if (depth < 0 || depth > 3) throw std::invalid_argument("depth must be in {0,1,2,3}");
    if (features.n() == 0 || features.n() != scores.n())
        throw std::invalid_argument("feature/score shape mismatch");
    TreeSearch search(features, scores, candidates);
    std::vector<int> rows(features.n());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    const BuiltTree built = search.solve(rows, depth);
    PolicyTree tree;
    tree.scale = scale;
    tree.feature_names = features.names();
    tree.max_depth = depth;
    tree.train_value = built.value / static_cast<double>(features.n());
    flatten(built, tree.nodes);
    return tree;
}

Assignment predict_tree(const PolicyTree& tree, const FeatureTable& features) {
    Assignment out;
    out.treatments.resize(features.n());
    for (std::size_t i = 0; i < features.n(); ++i) {
        int idx = 0;
        while (!tree.nodes[idx].is_leaf()) {
            const PolicyNode& node = tree.nodes[idx];
            const double v = features.columns[node.feature].values[i];
            if (!std::isfinite(v))
                throw std::invalid_argument("non-finite feature value at row " + std::to_string(i));
            idx = v <= node.threshold ? node.left : node.right;
        }
        out.treatments[i] = tree.nodes[idx].treatment;
    }
    return out;
}

namespace {

void render_node(const PolicyTree& tree, int idx, int indent, std::ostringstream& os) {
    const PolicyNode& node = tree.nodes[idx];
    const std::string pad(2 * indent, ' ');
    if (node.is_leaf()) {
        os << pad << "-> treatment " << node.treatment << "\n";
        return;
    }
    os << pad << tree.feature_names[node.feature] << " <= " << node.threshold << ":\n";
    render_node(tree, node.left, indent + 1, os);
    os << pad << tree.feature_names[node.feature] << " > " << node.threshold << ":\n";
    render_node(tree, node.right, indent + 1, os);
}

nlohmann::json node_to_json(const PolicyTree& tree, int idx) {
    const PolicyNode& node = tree.nodes[idx];
    if (node.is_leaf()) return {{"leaf", node.treatment}};
    return {{"feature", tree.feature_names[node.feature]},
            {"feature_index", node.feature},
            {"threshold", node.threshold},
            {"left", node_to_json(tree, node.left)},
            {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const nlohmann::json& j, std::vector<PolicyNode>& nodes) {
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back({});
    if (j.contains("leaf")) {
        nodes[idx].treatment = j["leaf"].get<int>();
        return idx;
    }
    nodes[idx].feature = j["feature_index"].get<int>();
    nodes[idx].threshold = j["threshold"].get<double>();
    const int left = node_from_json(j["left"], nodes);
    const int right = node_from_json(j["right"], nodes);
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
}

}  // namespace

std::string render_tree(const PolicyTree& tree) {
    std::ostringstream os;
    os.precision(10);
    render_node(tree, 0, 0, os);
    return os.str();
}

std::string tree_to_json(const PolicyTree& tree) {
    nlohmann::json j;
    j["scale"] = tree.scale == TreeScale::cdf ? "cdf" : "raw";
    j["max_depth"] = tree.max_depth;
    j["train_value"] = tree.train_value;
    j["feature_names"] = tree.feature_names;
    j["root"] = node_to_json(tree, 0);
    return j.dump(2);
}

PolicyTree tree_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    PolicyTree tree;
    tree.scale = j["scale"].get<std::string>() == "cdf" ? TreeScale::cdf : TreeScale::raw;
    tree.max_depth = j["max_depth"].get<int>();
    tree.train_value = j["train_value"].get<double>();
    tree.feature_names = j["feature_names"].get<std::vector<std::string>>();
    node_from_json(j["root"], tree.nodes);
    return tree;
}

}  // namespace fairpol
