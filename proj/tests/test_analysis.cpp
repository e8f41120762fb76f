#include "fairpol/analysis.hpp"
#include "fairpol/synthetic.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace fairpol;
using namespace testutil;

TEST_CASE("train/eval split partitions the rows deterministically") {
    auto s1 = DataSplit::make(100, 2.0 / 3.0, 7);
    auto s2 = DataSplit::make(100, 2.0 / 3.0, 7);
    auto s3 = DataSplit::make(100, 2.0 / 3.0, 8);
    CHECK(s1.train == s2.train);
    CHECK(s1.eval == s2.eval);
    CHECK(s1.train != s3.train);
    CHECK(s1.train.size() == 67);
    CHECK(s1.eval.size() == 33);
    std::set<std::size_t> all(s1.train.begin(), s1.train.end());
    all.insert(s1.eval.begin(), s1.eval.end());
    CHECK(all.size() == 100);
    CHECK(std::is_sorted(s1.train.begin(), s1.train.end()));
}

TEST_CASE("subsetting keeps rows aligned") {
    FeatureTable feat;
    feat.columns = {cont_col("x", {10, 20, 30, 40})};
    auto sens = groups({0, 1, 0, 1}, 2);
    auto scores = score_matrix(4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
    std::vector<std::size_t> idx = {1, 3};
    CHECK(subset(feat, idx).columns[0].values == std::vector<double>{20, 40});
    CHECK(subset(sens, idx).labels == std::vector<int>{1, 1});
    CHECK(subset(scores, idx).at(1, 1) == 8);
    Assignment a{{0, 1, 0, 1}};
    CHECK(subset(a, idx).treatments == std::vector<int>{1, 1});
}

TEST_CASE("per-row gains are score differences at the two assignments") {
    auto scores = score_matrix(3, 2, {1, 5, 2, 6, 3, 7});
    Assignment before{{0, 0, 1}};
    Assignment after{{1, 0, 0}};
    auto delta = winners_losers(before, after, scores);
    CHECK(delta == std::vector<double>{4, 0, -4});
}

TEST_CASE("comparison table has the documented policies in order") {
    auto data_raw = generate_synthetic({.n = 600}, 3);
    Dataset data{data_raw.features, data_raw.sensitive, data_raw.scores, data_raw.observed};
    AnalysisConfig config;
    config.depth = 1;
    config.n_points = 20;
    config.seed = 3;
    auto split = DataSplit::make(600, config.train_fraction, config.seed);
    auto result = run_comparison(data, config, split);

    std::vector<std::string> expected = {
        "observed",      "blackbox",        "blackbox_fair",
        "all_in_one",    "tree_unadjusted_incl_s", "tree_unadjusted_excl_s",
        "tree_adjust_a", "tree_adjust_scores", "tree_adjust_both",
        "pst_adjust_a",  "pst_adjust_both"};
    REQUIRE(result.rows.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(result.rows[i].policy == expected[i]);

    // blackbox is value-maximal among all rows
    double bb = result.rows[1].eval.policy_value;
    for (const auto& row : result.rows) CHECK(row.eval.policy_value <= bb + 1e-12);

    // shares are distributions
    for (const auto& row : result.rows) {
        double total = 0;
        for (double s : row.eval.program_shares) total += s;
        CHECK(total == doctest::Approx(1.0));
    }

    // the cdf-scale trees and their translations assign identically up to
    // threshold randomization, so values must be close
    CHECK(result.rows[9].eval.policy_value ==
          doctest::Approx(result.rows[6].eval.policy_value).epsilon(0.01));
}

TEST_CASE("sweep endpoints bracket the adjustment") {
    auto data_raw = generate_synthetic({.n = 600}, 5);
    Dataset data{data_raw.features, data_raw.sensitive, data_raw.scores, data_raw.observed};
    AnalysisConfig config;
    config.depth = 1;
    config.n_points = 20;
    config.seed = 5;
    config.lambdas = {0.0, 1.0};
    auto split = DataSplit::make(600, config.train_fraction, config.seed);
    auto points = partial_sweep(data, config, split, {AdjustTarget::features});
    REQUIRE(points.size() == 2);
    CHECK(points[0].lambda == 0.0);
    CHECK(points[1].lambda == 1.0);

    auto result = run_comparison(data, config, split);
    // lambda 0 reproduces the unadjusted tree, lambda 1 the fully adjusted one
    CHECK(points[0].policy_value == result.rows[5].eval.policy_value);
    CHECK(points[0].cramers_v == result.rows[5].eval.fairness.cramers_v);
    CHECK(points[1].policy_value == result.rows[6].eval.policy_value);
    CHECK(points[1].cramers_v == result.rows[6].eval.fairness.cramers_v);
}

TEST_CASE("k-means recovers well-separated scalar clusters") {
    std::vector<double> delta;
    FeatureTable cov;
    std::vector<double> ages;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 40; ++i) {
            delta.push_back(c * 10.0 + jitter(rng));
            ages.push_back(20.0 + 10 * c);
        }
    }
    cov.columns = {cont_col("age", ages)};
    auto summary = kmeans_cluster(delta, cov, {2, 3, 4, 5}, 0.01, 9);
    CHECK(summary.k == 3);
    CHECK(!summary.fallback);
    CHECK(summary.silhouette > 0.9);
    REQUIRE(summary.clusters.size() == 3);
    // ascending by mean gain, with per-cluster covariate profiles
    CHECK(summary.clusters[0].mean_delta < summary.clusters[1].mean_delta);
    CHECK(summary.clusters[1].mean_delta < summary.clusters[2].mean_delta);
    CHECK(summary.clusters[0].feature_means[0] == doctest::Approx(20.0));
    CHECK(summary.clusters[2].feature_means[0] == doctest::Approx(40.0));
    CHECK(summary.clusters[0].size == 40);
}

TEST_CASE("reported silhouette matches a naive oracle") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> delta;
    for (int i = 0; i < 60; ++i) delta.push_back(g(rng));
    for (int i = 0; i < 60; ++i) delta.push_back(g(rng) + 4);
    FeatureTable cov;
    cov.columns = {cont_col("x", std::vector<double>(120, 0.0))};
    auto summary = kmeans_cluster(delta, cov, {2}, 0.01, 5);
    REQUIRE(summary.k == 2);

    // recover labels by assigning to the nearer cluster mean on the
    // standardized scale the library uses
    double mean = 0, sq = 0;
    for (double d : delta) mean += d;
    mean /= delta.size();
    for (double d : delta) sq += (d - mean) * (d - mean);
    const double sd = std::sqrt(sq / delta.size());
    std::vector<int> labels;
    for (double d : delta) {
        const double z = (d - mean) / sd;
        double b0 = std::abs(z - (summary.clusters[0].mean_delta - mean) / sd);
        double b1 = std::abs(z - (summary.clusters[1].mean_delta - mean) / sd);
        labels.push_back(b0 <= b1 ? 0 : 1);
    }
    std::vector<double> standardized;
    for (double d : delta) standardized.push_back((d - mean) / sd);
    const double oracle = naive_silhouette(standardized, labels, 2);
    CHECK(summary.silhouette == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("degenerate deltas fall back to a single cluster") {
    std::vector<double> delta(50, 0.0);
    FeatureTable cov;
    cov.columns = {cont_col("x", std::vector<double>(50, 1.0))};
    auto summary = kmeans_cluster(delta, cov, {2, 3}, 0.01, 1);
    CHECK(summary.k == 1);
    CHECK(summary.fallback);
}

TEST_CASE("minimum share constraint filters tiny clusters") {
    // 99 points at 0, one outlier: any k=2 solution isolates the outlier
    std::vector<double> delta(99, 0.0);
    delta.push_back(100.0);
    FeatureTable cov;
    cov.columns = {cont_col("x", std::vector<double>(100, 1.0))};
    auto strict = kmeans_cluster(delta, cov, {2}, 0.05, 2);
    CHECK(strict.fallback);
    auto loose = kmeans_cluster(delta, cov, {2}, 0.005, 2);
    CHECK(!loose.fallback);
    CHECK(loose.k == 2);
}
