#include "fairpol/analysis.hpp"
#include "fairpol/cli_io.hpp"
#include "fairpol/synthetic.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fairpol;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data.begin());
    return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), arr.mutable_data());
    return arr;
}

FeatureTable make_features(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
    const std::vector<std::string>& names, const std::vector<std::string>& discrete) {
    const Matrix m = to_matrix(values);
    if (names.size() != m.cols) throw std::invalid_argument("one name per column required");
    FeatureTable table;
    for (std::size_t j = 0; j < m.cols; ++j) {
        FeatureColumn col;
        col.name = names[j];
        for (std::size_t i = 0; i < m.rows; ++i) col.values.push_back(m.at(i, j));
        if (std::find(discrete.begin(), discrete.end(), names[j]) != discrete.end()) {
            col.kind = ColumnKind::discrete;
            col.support = col.values;
            std::sort(col.support.begin(), col.support.end());
            col.support.erase(std::unique(col.support.begin(), col.support.end()),
                              col.support.end());
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

SensitiveVector make_sensitive(const std::vector<int>& labels) {
    SensitiveVector s;
    s.labels = labels;
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    for (int g = 0; g < k; ++g) s.group_names.push_back("group_" + std::to_string(g));
    return s;
}

ScoreMatrix make_scores(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
    ScoreMatrix s;
    s.values = to_matrix(values);
    for (std::size_t d = 0; d < s.values.cols; ++d)
        s.treatment_names.push_back("treatment_" + std::to_string(d));
    return s;
}

py::dict report_dict(const PolicyEvalReport& rep) {
    py::dict out;
    out["policy_value"] = rep.policy_value;
    out["program_shares"] = rep.program_shares;
    out["cramers_v"] = rep.fairness.cramers_v;
    out["p_value"] = rep.fairness.p_value;
    out["log_bf"] = rep.fairness.log_bf;
    out["degenerate"] = rep.fairness.degenerate;
    return out;
}

}  // namespace

PYBIND11_MODULE(_fairpol, m) {
    m.doc() = "fairness-aware interpretable policy learning";

    m.def(
        "mq_adjust",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::vector<std::string>& names, const std::vector<int>& groups,
           const std::vector<std::string>& discrete, std::uint64_t seed) {
            auto table = make_features(features, names, discrete);
            auto adj = mq_adjust_table(table, make_sensitive(groups), seed);
            return py::make_tuple(from_matrix(adj.adjusted), from_matrix(adj.p_values));
        },
        py::arg("features"), py::arg("names"), py::arg("groups"),
        py::arg("discrete") = std::vector<std::string>{}, py::arg("seed") = 42,
        "Quantile-match features across sensitive groups; returns (adjusted, cdf_values).");

    m.def(
        "fit_policy_tree",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::vector<std::string>& names,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           int depth, int n_points, const std::vector<std::string>& discrete) {
            auto table = make_features(features, names, discrete);
            auto score_m = make_scores(scores);
            auto tree = fit_tree(table, score_m, depth,
                                 enumerate_candidates(table, n_points));
            py::dict out;
            out["json"] = tree_to_json(tree);
            out["text"] = render_tree(tree);
            out["train_value"] = tree.train_value;
            out["depth"] = tree.depth();
            return out;
        },
        py::arg("features"), py::arg("names"), py::arg("scores"), py::arg("depth") = 3,
        py::arg("n_points") = 100, py::arg("discrete") = std::vector<std::string>{},
        "Fit a globally optimal shallow policy tree; returns a dict with json/text/value.");

    m.def(
        "predict_policy_tree",
        [](const std::string& tree_json,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::vector<std::string>& names) {
            auto tree = tree_from_json(tree_json);
            auto table = make_features(features, names, {});
            auto a = predict_tree(tree, table);
            return a.treatments;
        },
        py::arg("tree_json"), py::arg("features"), py::arg("names"));

    m.def(
        "evaluate_assignment",
        [](const std::vector<int>& treatments,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           const std::vector<int>& groups) {
            Assignment a;
            a.treatments = treatments;
            return report_dict(evaluate_policy(a, make_scores(scores), make_sensitive(groups)));
        },
        py::arg("treatments"), py::arg("scores"), py::arg("groups"),
        "Policy value, program shares, and fairness statistics of an assignment.");

    m.def(
        "fairness_metrics",
        [](const std::vector<std::vector<std::int64_t>>& counts, double prior) {
            ContingencyTable t;
            t.counts = counts;
            auto rep = fairness_report(t, prior);
            py::dict out;
            out["cramers_v"] = rep.cramers_v;
            out["chi2"] = rep.chi2;
            out["dof"] = rep.dof;
            out["p_value"] = rep.p_value;
            out["log_bf"] = rep.log_bf;
            out["degenerate"] = rep.degenerate;
            return out;
        },
        py::arg("counts"), py::arg("prior_concentration") = 1.0);

    m.def(
        "generate_synthetic",
        [](std::size_t n, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n = n;
            auto data = generate_synthetic(spec, seed);
            Matrix feat(data.features.n(), data.features.n_features());
            for (std::size_t j = 0; j < data.features.n_features(); ++j)
                for (std::size_t i = 0; i < data.features.n(); ++i)
                    feat.at(i, j) = data.features.columns[j].values[i];
            py::dict out;
            out["features"] = from_matrix(feat);
            out["feature_names"] = data.features.names();
            out["groups"] = data.sensitive.labels;
            out["group_names"] = data.sensitive.group_names;
            out["scores"] = from_matrix(data.scores.values);
            out["observed"] = data.observed.treatments;
            return out;
        },
        py::arg("n") = 10000, py::arg("seed") = 42);

    m.def(
        "run_comparison",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::vector<std::string>& names, const std::vector<int>& groups,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           const std::vector<int>& observed, int depth, int n_points, std::uint64_t seed,
           const std::vector<std::string>& discrete) {
            Dataset data;
            data.features = make_features(features, names, discrete);
            data.sensitive = make_sensitive(groups);
            data.scores = make_scores(scores);
            if (!observed.empty()) {
                Assignment a;
                a.treatments = observed;
                data.observed = a;
            }
            AnalysisConfig config;
            config.depth = depth;
            config.n_points = n_points;
            config.seed = seed;
            auto split = DataSplit::make(data.features.n(), config.train_fraction, seed);
            auto result = run_comparison(data, config, split);
            py::list rows;
            for (const auto& row : result.rows) {
                py::dict d = report_dict(row.eval);
                d["policy"] = row.policy;
                d["interpretable"] = row.interpretable;
                rows.append(d);
            }
            return rows;
        },
        py::arg("features"), py::arg("names"), py::arg("groups"), py::arg("scores"),
        py::arg("observed") = std::vector<int>{}, py::arg("depth") = 3,
        py::arg("n_points") = 100, py::arg("seed") = 42,
        py::arg("discrete") = std::vector<std::string>{},
        "Benchmark-policy comparison table as a list of row dicts.");
}
