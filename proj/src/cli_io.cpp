#include "fairpol/cli_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairpol {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << "\n";
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << format_double(columns[j][i]);
        out << "\n";
    }
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    for (std::size_t i = 0; i < table.header.size(); ++i)
        for (std::size_t j = i + 1; j < table.header.size(); ++j)
            if (table.header[i] == table.header[j])
                throw std::runtime_error(path.string() + ": duplicate column '" +
                                         table.header[i] + "'");
    table.columns.resize(table.header.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::stringstream ls(line);
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= table.header.size())
                throw std::runtime_error(path.string() + ": too many cells in row " +
                                         std::to_string(row));
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw std::runtime_error(path.string() + ": non-numeric cell '" + cell +
                                         "' at row " + std::to_string(row) + ", column " +
                                         table.header[col]);
            table.columns[col].push_back(v);
            ++col;
        }
        if (col != table.header.size())
            throw std::runtime_error(path.string() + ": missing cells in row " +
                                     std::to_string(row));
    }
    return table;
}

namespace {

AdjustTarget target_from_string(const std::string& s) {
    if (s == "A" || s == "features") return AdjustTarget::features;
    if (s == "scores" || s == "Gamma") return AdjustTarget::scores;
    if (s == "both") return AdjustTarget::both;
    throw std::invalid_argument("unknown adjustment target '" + s + "'");
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunConfig config;
    if (j.contains("data")) {
        const auto& d = j["data"];
        config.features_path = d.value("features", "");
        config.scores_path = d.value("scores", "");
        config.sensitive_path = d.value("sensitive", "");
        config.observed_path = d.value("observed", "");
        config.discrete_features =
            d.value("discrete_features", std::vector<std::string>{});
    }
    if (j.contains("synthetic")) {
        config.use_synthetic = true;
        const auto& s = j["synthetic"];
        config.synthetic.n = s.value("n", config.synthetic.n);
        if (s.contains("group_probs"))
            config.synthetic.group_probs = s["group_probs"].get<std::vector<double>>();
        if (s.contains("age_shift"))
            config.synthetic.age_shift = s["age_shift"].get<std::vector<double>>();
        if (s.contains("zero_earn_prob"))
            config.synthetic.zero_earn_prob = s["zero_earn_prob"].get<std::vector<double>>();
        if (s.contains("degree_prob"))
            config.synthetic.degree_prob = s["degree_prob"].get<std::vector<double>>();
        config.synthetic.score_noise_sd =
            s.value("score_noise_sd", config.synthetic.score_noise_sd);
    }
    config.analysis.depth = j.value("depth", 3);
    config.analysis.n_points = j.value("n_points", 100);
    config.analysis.seed = j.value("seed", std::uint64_t{42});
    config.analysis.train_fraction = j.value("train_fraction", 2.0 / 3.0);
    config.analysis.lambdas = j.value("lambdas", std::vector<double>{});
    config.analysis.prior_concentration = j.value("prior_concentration", 1.0);
    if (j.contains("target")) config.target = target_from_string(j["target"].get<std::string>());
    config.cluster_k_range = j.value("cluster_k_range", config.cluster_k_range);
    config.cluster_min_share = j.value("cluster_min_share", 0.01);
    config.out_dir = j.value("out", ".");
    if (config.analysis.depth < 0 || config.analysis.depth > 3)
        throw std::invalid_argument("depth must be in {0..3}");
    if (config.analysis.n_points < 1) throw std::invalid_argument("n_points must be >= 1");
    return config;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string RunConfig::to_json() const {
    nlohmann::json j;
    if (use_synthetic) {
        j["synthetic"] = {{"n", synthetic.n},
                          {"group_probs", synthetic.group_probs},
                          {"age_shift", synthetic.age_shift},
                          {"zero_earn_prob", synthetic.zero_earn_prob},
                          {"degree_prob", synthetic.degree_prob},
                          {"score_noise_sd", synthetic.score_noise_sd}};
    } else {
        j["data"] = {{"features", features_path},
                     {"scores", scores_path},
                     {"sensitive", sensitive_path},
                     {"observed", observed_path},
                     {"discrete_features", discrete_features}};
    }
    j["depth"] = analysis.depth;
    j["n_points"] = analysis.n_points;
    j["seed"] = analysis.seed;
    j["train_fraction"] = analysis.train_fraction;
    j["lambdas"] = analysis.lambdas;
    j["prior_concentration"] = analysis.prior_concentration;
    j["target"] = to_string(target);
    j["cluster_k_range"] = cluster_k_range;
    j["cluster_min_share"] = cluster_min_share;
    j["out"] = out_dir;
    return j.dump(2);
}

Dataset load_dataset(const RunConfig& config) {
    if (config.use_synthetic) {
        SyntheticData synth = generate_synthetic(config.synthetic, config.analysis.seed);
        Dataset data{std::move(synth.features), std::move(synth.sensitive),
                     std::move(synth.scores), std::move(synth.observed)};
        return data;
    }
    Dataset data;
    const CsvTable feat = read_csv(config.features_path);
    const std::set<std::string> discrete(config.discrete_features.begin(),
                                         config.discrete_features.end());
    {
        std::set<std::string> seen;
        for (const auto& name : feat.header)
            if (!seen.insert(name).second)
                throw std::runtime_error("duplicate feature column '" + name + "'");
    }
    for (std::size_t j = 0; j < feat.header.size(); ++j) {
        FeatureColumn col;
        col.name = feat.header[j];
        col.values = feat.columns[j];
        if (discrete.count(col.name)) {
            col.kind = ColumnKind::discrete;
            col.support = col.values;
            std::sort(col.support.begin(), col.support.end());
            col.support.erase(std::unique(col.support.begin(), col.support.end()),
                              col.support.end());
        }
        data.features.columns.push_back(std::move(col));
    }

    const CsvTable sens = read_csv(config.sensitive_path);
    // cross-product encoding of one or more discrete sensitive columns
    std::vector<std::vector<double>> supports(sens.header.size());
    for (std::size_t j = 0; j < sens.header.size(); ++j) {
        supports[j] = sens.columns[j];
        std::sort(supports[j].begin(), supports[j].end());
        supports[j].erase(std::unique(supports[j].begin(), supports[j].end()),
                          supports[j].end());
    }
    std::vector<std::string> group_names;
    std::vector<int> strides(sens.header.size(), 1);
    int k = 1;
    for (std::size_t j = sens.header.size(); j-- > 0;) {
        strides[j] = k;
        k *= static_cast<int>(supports[j].size());
    }
    for (int g = 0; g < k; ++g) {
        std::string name;
        int rem = g;
        for (std::size_t j = 0; j < sens.header.size(); ++j) {
            const int lvl = rem / strides[j];
            rem %= strides[j];
            if (!name.empty()) name += "|";
            name += sens.header[j] + "=" + format_double(supports[j][lvl]);
        }
        group_names.push_back(name);
    }
    data.sensitive.group_names = std::move(group_names);
    for (std::size_t i = 0; i < sens.n_rows(); ++i) {
        int label = 0;
        for (std::size_t j = 0; j < sens.header.size(); ++j) {
            const auto it = std::lower_bound(supports[j].begin(), supports[j].end(),
                                             sens.columns[j][i]);
            label += strides[j] * static_cast<int>(it - supports[j].begin());
        }
        data.sensitive.labels.push_back(label);
    }

    const CsvTable sc = read_csv(config.scores_path);
    data.scores.treatment_names = sc.header;
    data.scores.values = Matrix(sc.n_rows(), sc.header.size());
    for (std::size_t i = 0; i < sc.n_rows(); ++i)
        for (std::size_t d = 0; d < sc.header.size(); ++d)
            data.scores.values.at(i, d) = sc.columns[d][i];

    if (!config.observed_path.empty() &&
        std::filesystem::exists(config.observed_path)) {
        const CsvTable obs = read_csv(config.observed_path);
        Assignment observed;
        for (double v : obs.columns.at(0)) observed.treatments.push_back(static_cast<int>(v));
        data.observed = std::move(observed);
    }

    const auto report = validate_dataset(data.features, data.sensitive, data.scores);
    if (!report.empty()) {
        std::string msg = "dataset validation failed:";
        for (const auto& r : report) msg += "\n  " + r;
        throw std::runtime_error(msg);
    }
    return data;
}

void write_dataset(const std::filesystem::path& dir, const SyntheticData& data) {
    std::filesystem::create_directories(dir);
    {
        std::vector<std::string> header;
        std::vector<std::vector<double>> cols;
        for (const auto& c : data.features.columns) {
            header.push_back(c.name);
            cols.push_back(c.values);
        }
        write_csv(dir / "features.csv", header, cols);
    }
    {
        std::vector<double> labels(data.sensitive.labels.begin(), data.sensitive.labels.end());
        write_csv(dir / "sensitive.csv", {"group"}, {labels});
    }
    {
        std::vector<std::vector<double>> cols(data.scores.n_treatments());
        for (std::size_t d = 0; d < data.scores.n_treatments(); ++d) {
            cols[d].resize(data.scores.n());
            for (std::size_t i = 0; i < data.scores.n(); ++i) cols[d][i] = data.scores.at(i, d);
        }
        write_csv(dir / "scores.csv", data.scores.treatment_names, cols);
    }
    {
        std::vector<double> obs(data.observed.treatments.begin(), data.observed.treatments.end());
        write_csv(dir / "observed.csv", {"treatment"}, {obs});
    }
}

void emit_reports(const std::filesystem::path& dir, const RunConfig& config,
                  const ComparisonResult* comparison, const std::vector<SweepPoint>* sweep,
                  const ClusterSummary* clusters,
                  const std::vector<std::string>& treatment_names) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["seed"] = config.analysis.seed;
    meta["config"] = nlohmann::json::parse(config.to_json());
    meta["log_base"] = "natural";

    if (comparison) {
        std::ofstream out(dir / "comparison.csv");
        if (!out) throw std::runtime_error("cannot write comparison.csv");
        out << "policy,interpretable,policy_value,cramers_v,p_value,log_bf";
        for (std::size_t d = 0; d < treatment_names.size(); ++d) out << ",share_" << d;
        out << "\n";
        for (const auto& row : comparison->rows) {
            out << row.policy << "," << (row.interpretable ? "true" : "false") << ","
                << format_double(row.eval.policy_value) << ","
                << format_double(row.eval.fairness.cramers_v) << ","
                << format_double(row.eval.fairness.p_value) << ","
                << format_double(row.eval.fairness.log_bf);
            for (double s : row.eval.program_shares) out << "," << format_double(s);
            out << "\n";
        }
        for (const auto& note : comparison->notes) meta["notes"].push_back(note);

        std::ofstream trees_txt(dir / "trees.txt");
        trees_txt << "== fairness-unaware policy tree (excl. sensitive) ==\n"
                  << render_tree(comparison->tree_excl_s) << "\n"
                  << "== probabilistic split tree (adjust features) ==\n"
                  << condense(comparison->pst_adjust_a, treatment_names) << "\n"
                  << "== probabilistic split tree (adjust features and scores) ==\n"
                  << condense(comparison->pst_adjust_both, treatment_names);

        nlohmann::json trees;
        trees["tree_excl_s"] = nlohmann::json::parse(tree_to_json(comparison->tree_excl_s));
        trees["tree_adjust_a"] = nlohmann::json::parse(tree_to_json(comparison->tree_adjust_a));
        trees["tree_adjust_both"] =
            nlohmann::json::parse(tree_to_json(comparison->tree_adjust_both));
        trees["pst_adjust_a"] =
            nlohmann::json::parse(prob_policy_to_json(comparison->pst_adjust_a));
        trees["pst_adjust_both"] =
            nlohmann::json::parse(prob_policy_to_json(comparison->pst_adjust_both));
        std::ofstream trees_json(dir / "trees.json");
        trees_json << trees.dump(2) << "\n";
    }

    if (sweep) {
        if (config.analysis.lambdas.empty()) {
            meta["notes"].push_back("empty lambda grid; sweep.csv omitted");
        } else {
            std::ofstream out(dir / "sweep.csv");
            out << "target,lambda,policy_value,cramers_v\n";
            for (const auto& p : *sweep)
                out << to_string(p.target) << "," << format_double(p.lambda) << ","
                    << format_double(p.policy_value) << "," << format_double(p.cramers_v) << "\n";
        }
    }

    if (clusters) {
        std::ofstream out(dir / "clusters.csv");
        out << "cluster,mean_delta,size";
        for (const auto& name : clusters->feature_names) out << ",mean_" << name;
        out << "\n";
        for (std::size_t c = 0; c < clusters->clusters.size(); ++c) {
            const auto& cl = clusters->clusters[c];
            out << c << "," << format_double(cl.mean_delta) << "," << cl.size;
            for (double m : cl.feature_means) out << "," << format_double(m);
            out << "\n";
        }
        meta["cluster_k"] = clusters->k;
        meta["cluster_silhouette"] = clusters->silhouette;
        meta["cluster_fallback"] = clusters->fallback;
    }

    std::ofstream meta_out(dir / "run_metadata.json");
    meta_out << meta.dump(2) << "\n";
}

}  // namespace fairpol
