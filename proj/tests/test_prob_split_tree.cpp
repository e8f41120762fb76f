#include "fairpol/prob_split_tree.hpp"
#include "fairpol/scores.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace fairpol;
using namespace testutil;

namespace {

// Small two-group dataset with all-distinct continuous features and scores
// engineered so the optimal cdf-scale tree actually splits.
struct Fixture {
    FeatureTable feat;
    SensitiveVector sens;
    ScoreMatrix scores;
};

Fixture make_fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    const std::size_t n = 60;
    std::vector<double> x, z;
    std::vector<int> labels;
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
        const int g = static_cast<int>(i % 2);
        labels.push_back(g);
        const double xi = u(rng) * 10 + g * 5;  // group-shifted
        const double zi = u(rng) * 3;
        x.push_back(xi);
        z.push_back(zi);
        // reward treatment 1 for the upper half of each group's x range
        const double upper = (xi - g * 5) > 5 ? 1.0 : 0.0;
        flat.push_back(1 - upper + 0.01 * zi);
        flat.push_back(upper);
    }
    Fixture f;
    f.feat.columns = {cont_col("x", x), cont_col("z", z)};
    f.sens = groups(labels, 2);
    f.scores = score_matrix(n, 2, flat);
    return f;
}

}  // namespace

TEST_CASE("translated trees reproduce the cdf-scale partition on training data") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto fx = make_fixture(seed + 1000);
        auto adj = mq_adjust_table(fx.feat, fx.sens, seed);
        auto cdf_table = adj.cdf_scale_table();
        auto tree = fit_tree(cdf_table, fx.scores, 2, enumerate_candidates(cdf_table, 30),
                             TreeScale::cdf);
        auto policy = transform(tree, adj, fx.feat, fx.sens);
        auto direct = predict_tree(tree, cdf_table);
        auto via_groups = predict_prob(policy, fx.feat, fx.sens, seed + 7);
        CHECK(via_groups.treatments == direct.treatments);
    }
}

TEST_CASE("transform refuses raw-scale trees") {
    auto fx = make_fixture(5);
    auto adj = mq_adjust_table(fx.feat, fx.sens, 5);
    auto tree = fit_tree(fx.feat, fx.scores, 1, enumerate_candidates(fx.feat, 10));
    CHECK_THROWS(transform(tree, adj, fx.feat, fx.sens));
}

TEST_CASE("tied units at the threshold are routed left with the node share") {
    // ten units of one group all sharing one discrete value; their cdf draws
    // cover (0, 1]. A threshold at the 8th smallest draw puts 8 of 10 below,
    // so the translated node must carry a left share of exactly 0.8.
    FeatureTable feat;
    feat.columns = {disc_col("x", std::vector<double>(10, 5.0), {5.0})};
    auto sens = groups(std::vector<int>(10, 0), 1);
    auto adj = mq_adjust_table(feat, sens, 99);
    std::vector<double> ps;
    for (int i = 0; i < 10; ++i) ps.push_back(adj.p_values.at(i, 0));
    std::sort(ps.begin(), ps.end());
    const double threshold = ps[7];

    PolicyTree tree;
    tree.scale = TreeScale::cdf;
    tree.feature_names = {"x"};
    tree.max_depth = 1;
    tree.nodes = {{0, threshold, 1, 2, -1}, {-1, 0, -1, -1, 1}, {-1, 0, -1, -1, 0}};

    auto policy = transform(tree, adj, feat, sens);
    REQUIRE(policy.group_trees.size() == 1);
    const auto& root = policy.group_trees[0].nodes[0];
    CHECK(root.strict);
    CHECK(root.p_tilde == doctest::Approx(0.8));
    CHECK(root.threshold == doctest::Approx(5.0));

    // empirical check on a single tied unit across seeds
    FeatureTable one;
    one.columns = {disc_col("x", {5.0}, {5.0})};
    auto one_sens = groups({0}, 1);
    int lefts = 0;
    const int reps = 2000;
    for (int seed = 0; seed < reps; ++seed) {
        auto a = predict_prob(policy, one, one_sens,
                              static_cast<std::uint64_t>(seed));
        if (a.treatments[0] == 1) lefts++;
    }
    const double share = static_cast<double>(lefts) / reps;
    CHECK(share == doctest::Approx(0.8).epsilon(0.04));
}

TEST_CASE("deterministic nodes floor interpolated thresholds on discrete features") {
    // group cdf over {1, 2, 4}: a threshold p falling in a support gap maps to
    // a non-integer g; routing "<= floor(g)" must reproduce "p-values <= p"
    FeatureTable feat;
    feat.columns = {disc_col("x", {1, 1, 2, 2, 4, 4}, {1, 2, 4})};
    auto sens = groups(std::vector<int>(6, 0), 1);
    auto adj = mq_adjust_table(feat, sens, 4);

    // pick p strictly between the draws of value 2 and value 4
    double p_hi_2 = 0, p_lo_4 = 1;
    for (int i = 0; i < 6; ++i) {
        if (feat.columns[0].values[i] == 2) p_hi_2 = std::max(p_hi_2, adj.p_values.at(i, 0));
        if (feat.columns[0].values[i] == 4) p_lo_4 = std::min(p_lo_4, adj.p_values.at(i, 0));
    }
    REQUIRE(p_hi_2 < p_lo_4);
    const double p = 0.5 * (p_hi_2 + p_lo_4);

    PolicyTree tree;
    tree.scale = TreeScale::cdf;
    tree.feature_names = {"x"};
    tree.max_depth = 1;
    tree.nodes = {{0, p, 1, 2, -1}, {-1, 0, -1, -1, 1}, {-1, 0, -1, -1, 0}};
    auto policy = transform(tree, adj, feat, sens);
    const auto& root = policy.group_trees[0].nodes[0];
    CHECK(!root.strict);
    CHECK(root.threshold <= 3.0);  // floored into the support gap
    CHECK(root.threshold >= 2.0);
    auto a = predict_prob(policy, feat, sens, 1);
    CHECK(a.treatments == std::vector<int>{1, 1, 1, 1, 0, 0});
}

TEST_CASE("json round trip preserves the group trees") {
    auto fx = make_fixture(11);
    auto adj = mq_adjust_table(fx.feat, fx.sens, 11);
    auto cdf_table = adj.cdf_scale_table();
    auto tree = fit_tree(cdf_table, fx.scores, 2, enumerate_candidates(cdf_table, 20),
                         TreeScale::cdf);
    auto policy = transform(tree, adj, fx.feat, fx.sens);
    auto back = prob_policy_from_json(prob_policy_to_json(policy));
    REQUIRE(back.group_trees.size() == policy.group_trees.size());
    for (std::size_t g = 0; g < policy.group_trees.size(); ++g) {
        REQUIRE(back.group_trees[g].nodes.size() == policy.group_trees[g].nodes.size());
        for (std::size_t i = 0; i < policy.group_trees[g].nodes.size(); ++i) {
            const auto& x = policy.group_trees[g].nodes[i];
            const auto& y = back.group_trees[g].nodes[i];
            CHECK(x.feature == y.feature);
            CHECK(x.threshold == y.threshold);
            CHECK(x.p_tilde == y.p_tilde);
            CHECK(x.strict == y.strict);
            CHECK(x.treatment == y.treatment);
        }
    }
    auto a1 = predict_prob(policy, fx.feat, fx.sens, 3);
    auto a2 = predict_prob(back, fx.feat, fx.sens, 3);
    CHECK(a1.treatments == a2.treatments);
}

TEST_CASE("condensed rendering lists every group") {
    auto fx = make_fixture(8);
    auto adj = mq_adjust_table(fx.feat, fx.sens, 8);
    auto cdf_table = adj.cdf_scale_table();
    auto tree = fit_tree(cdf_table, fx.scores, 1, enumerate_candidates(cdf_table, 20),
                         TreeScale::cdf);
    auto policy = transform(tree, adj, fx.feat, fx.sens);
    auto text = condense(policy, fx.scores.treatment_names);
    CHECK(text.find("g0") != std::string::npos);
    CHECK(text.find("g1") != std::string::npos);
    CHECK(text.find("t0") != std::string::npos);
}
