#include "fairpol/cli_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace fairpol;

int run(int argc, char** argv) {
    CLI::App app{"fairness-aware policy learning from score matrices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed_override, "seed (overrides config)")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    auto* cmd_validate = app.add_subcommand("validate", "check dataset invariants");
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
    auto* cmd_adjust = app.add_subcommand("adjust", "MQ-adjust features and/or scores");
    auto* cmd_fit = app.add_subcommand("fit", "fit an optimal policy tree");
    auto* cmd_transform =
        app.add_subcommand("transform", "translate a cdf-scale tree to group-specific trees");
    auto* cmd_evaluate = app.add_subcommand("evaluate", "policy value and fairness of a policy");
    auto* cmd_compare = app.add_subcommand("compare", "benchmark-policy comparison table");
    auto* cmd_sweep = app.add_subcommand("sweep", "partial fairness-adjustment sweep");
    auto* cmd_cluster = app.add_subcommand("cluster", "winners/losers clustering");

    CLI11_PARSE(app, argc, argv);

    RunConfig config = RunConfig::from_json_file(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed_set) config.analysis.seed = seed_override;
    const std::filesystem::path out(config.out_dir);
    std::filesystem::create_directories(out);

    if (cmd_synth->parsed()) {
        SyntheticData data = generate_synthetic(config.synthetic, config.analysis.seed);
        write_dataset(out, data);
        std::cout << "wrote synthetic dataset (n=" << data.features.n() << ") to " << out
                  << "\n";
        return 0;
    }

    Dataset data = load_dataset(config);
    if (data.sensitive.k() > 32)
        std::cerr << "warning: " << data.sensitive.k()
                  << " sensitive groups; group cells may be too small\n";

    if (cmd_validate->parsed()) {
        const auto report = validate_dataset(data.features, data.sensitive, data.scores);
        for (const auto& r : report) std::cout << r << "\n";
        if (report.empty()) std::cout << "dataset valid (n=" << data.features.n() << ")\n";
        return report.empty() ? 0 : 1;
    }

    if (cmd_adjust->parsed()) {
        const AdjustedFeatures adj =
            mq_adjust_table(data.features, data.sensitive, config.analysis.seed);
        std::vector<std::string> header;
        std::vector<std::vector<double>> cols;
        for (std::size_t j = 0; j < adj.n_features(); ++j) {
            header.push_back(adj.names[j] + "__p");
            header.push_back(adj.names[j] + "__adj");
            std::vector<double> p(adj.n()), a(adj.n());
            for (std::size_t i = 0; i < adj.n(); ++i) {
                p[i] = adj.p_values.at(i, j);
                a[i] = adj.adjusted.at(i, j);
            }
            cols.push_back(std::move(p));
            cols.push_back(std::move(a));
        }
        write_csv(out / "adjusted.csv", header, cols);
        std::ofstream meta(out / "run_metadata.json");
        meta << "{\"seed\": " << adj.rng_seed << "}\n";
        std::cout << "wrote " << (out / "adjusted.csv") << "\n";
        return 0;
    }

    const DataSplit split =
        DataSplit::make(data.features.n(), config.analysis.train_fraction, config.analysis.seed);

    if (cmd_fit->parsed()) {
        const FeatureTable feat_t = subset(data.features, split.train);
        const ScoreMatrix scores_t = subset(data.scores, split.train);
        const PolicyTree tree =
            fit_tree(feat_t, scores_t, config.analysis.depth,
                     enumerate_candidates(feat_t, config.analysis.n_points));
        std::ofstream(out / "tree.json") << tree_to_json(tree) << "\n";
        std::ofstream(out / "tree.txt") << render_tree(tree);
        std::cout << "fitted depth-" << tree.depth()
                  << " tree, training value " << tree.train_value << "\n";
        return 0;
    }

    if (cmd_transform->parsed()) {
        const FeatureTable feat_t = subset(data.features, split.train);
        const ScoreMatrix scores_t = subset(data.scores, split.train);
        const SensitiveVector sens_t = subset(data.sensitive, split.train);
        const AdjustedFeatures adj =
            mq_adjust_table(feat_t, sens_t, config.analysis.seed);
        const FeatureTable cdf_t = adj.cdf_scale_table();
        const PolicyTree tree =
            fit_tree(cdf_t, scores_t, config.analysis.depth,
                     enumerate_candidates(cdf_t, config.analysis.n_points), TreeScale::cdf);
        const ProbSplitPolicy policy = transform(tree, adj, feat_t, sens_t);
        std::ofstream(out / "prob_split_tree.json") << prob_policy_to_json(policy) << "\n";
        std::ofstream(out / "prob_split_tree.txt")
            << condense(policy, data.scores.treatment_names);
        std::cout << "wrote " << (out / "prob_split_tree.txt") << "\n";
        return 0;
    }

    if (cmd_evaluate->parsed()) {
        if (!data.observed) {
            std::cerr << "evaluate requires an observed assignment column\n";
            return 1;
        }
        const PolicyEvalReport report =
            evaluate_policy(*data.observed, data.scores, data.sensitive);
        std::cout << "policy_value " << report.policy_value << "\n"
                  << "cramers_v " << report.fairness.cramers_v << "\n"
                  << "p_value " << report.fairness.p_value << "\n"
                  << "log_bf " << report.fairness.log_bf << "\n";
        return 0;
    }

    if (cmd_compare->parsed()) {
        const ComparisonResult result = run_comparison(data, config.analysis, split);
        emit_reports(out, config, &result, nullptr, nullptr, data.scores.treatment_names);
        std::cout << "wrote comparison table (" << result.rows.size() << " policies) to " << out
                  << "\n";
        return 0;
    }

    if (cmd_sweep->parsed()) {
        const std::vector<AdjustTarget> targets = {AdjustTarget::features, AdjustTarget::scores,
                                                   AdjustTarget::both};
        const auto sweep = partial_sweep(data, config.analysis, split, targets);
        emit_reports(out, config, nullptr, &sweep, nullptr, data.scores.treatment_names);
        std::cout << "wrote sweep (" << sweep.size() << " points) to " << out << "\n";
        return 0;
    }

    if (cmd_cluster->parsed()) {
        const ComparisonResult result = run_comparison(data, config.analysis, split);
        const ScoreMatrix scores_e = subset(data.scores, split.eval);
        const auto delta =
            winners_losers(result.assign_excl_s, result.assign_pst_both, scores_e);
        FeatureTable covariates = subset(data.features, split.eval);
        const ClusterSummary summary =
            kmeans_cluster(delta, covariates, config.cluster_k_range, config.cluster_min_share,
                           config.analysis.seed);
        emit_reports(out, config, nullptr, nullptr, &summary, data.scores.treatment_names);
        std::cout << "selected k=" << summary.k << " (silhouette " << summary.silhouette
                  << ") -> " << (out / "clusters.csv") << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
