#include "fairpol/cli_io.hpp"

#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>

using namespace fairpol;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fairpol_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("doubles format to the shortest round-trip representation") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    const double awkward = 0.1 + 0.2;
    double back = 0;
    auto s = format_double(awkward);
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == awkward);
}

TEST_CASE("csv writes and reads losslessly") {
    TempDir tmp;
    const auto file = tmp.path / "t.csv";
    std::vector<std::string> header = {"a", "b"};
    std::vector<std::vector<double>> cols = {{1.5, -2.25, 1.0 / 3.0},
                                             {0, 1e300, -std::numeric_limits<double>::infinity()}};
    write_csv(file, header, cols);
    auto table = read_csv(file);
    CHECK(table.header == header);
    REQUIRE(table.columns.size() == 2);
    CHECK(table.columns[0] == cols[0]);
    CHECK(table.columns[1] == cols[1]);
}

TEST_CASE("csv parse errors point at the offending cell") {
    TempDir tmp;
    const auto file = tmp.path / "bad.csv";
    std::ofstream(file) << "a,b\n1,2\n3,oops\n";
    try {
        read_csv(file);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("oops") != std::string::npos);
    }

    std::ofstream(tmp.path / "dup.csv") << "a,a\n1,2\n";
    CHECK_THROWS(read_csv(tmp.path / "dup.csv"));

    std::ofstream(tmp.path / "ragged.csv") << "a,b\n1\n";
    CHECK_THROWS(read_csv(tmp.path / "ragged.csv"));
}

TEST_CASE("run config json round trips") {
    RunConfig config;
    config.use_synthetic = true;
    config.synthetic.n = 500;
    config.analysis.depth = 2;
    config.analysis.seed = 123;
    config.analysis.lambdas = {0, 0.25, 1};
    config.target = AdjustTarget::both;
    config.out_dir = "/tmp/somewhere";
    auto back = RunConfig::from_json(config.to_json());
    CHECK(back.use_synthetic);
    CHECK(back.synthetic.n == 500);
    CHECK(back.analysis.depth == 2);
    CHECK(back.analysis.seed == 123);
    CHECK(back.analysis.lambdas == config.analysis.lambdas);
    CHECK(back.target == AdjustTarget::both);
    CHECK(back.out_dir == "/tmp/somewhere");

    CHECK_THROWS(RunConfig::from_json("{not json"));
}

TEST_CASE("datasets round trip through csv files") {
    TempDir tmp;
    SyntheticSpec spec;
    spec.n = 300;
    auto data = generate_synthetic(spec, 8);
    write_dataset(tmp.path, data);

    RunConfig config;
    config.features_path = (tmp.path / "features.csv").string();
    config.sensitive_path = (tmp.path / "sensitive.csv").string();
    config.scores_path = (tmp.path / "scores.csv").string();
    config.observed_path = (tmp.path / "observed.csv").string();
    config.discrete_features = {"degree"};
    auto loaded = load_dataset(config);

    CHECK(loaded.features.n() == 300);
    REQUIRE(loaded.features.n_features() == data.features.n_features());
    for (std::size_t j = 0; j < data.features.n_features(); ++j) {
        CHECK(loaded.features.columns[j].name == data.features.columns[j].name);
        CHECK(loaded.features.columns[j].values == data.features.columns[j].values);
    }
    CHECK(loaded.sensitive.k() == 4);
    CHECK(loaded.scores.values.data == data.scores.values.data);
    REQUIRE(loaded.observed.has_value());
    CHECK(loaded.observed->treatments == data.observed.treatments);
    // group relabeling must preserve the partition
    for (std::size_t i = 1; i < 300; ++i)
        CHECK((loaded.sensitive.labels[i] == loaded.sensitive.labels[0]) ==
              (data.sensitive.labels[i] == data.sensitive.labels[0]));
}

TEST_CASE("multi-column sensitive files map to cross-product groups") {
    TempDir tmp;
    std::ofstream(tmp.path / "features.csv") << "x\n1\n2\n3\n4\n";
    std::ofstream(tmp.path / "sensitive.csv") << "gender,foreign\n0,0\n0,1\n1,0\n1,1\n";
    std::ofstream(tmp.path / "scores.csv") << "t0,t1\n1,2\n3,4\n5,6\n7,8\n";
    RunConfig config;
    config.features_path = (tmp.path / "features.csv").string();
    config.sensitive_path = (tmp.path / "sensitive.csv").string();
    config.scores_path = (tmp.path / "scores.csv").string();
    auto loaded = load_dataset(config);
    CHECK(loaded.sensitive.k() == 4);
    CHECK(loaded.sensitive.labels == std::vector<int>{0, 1, 2, 3});
    CHECK(loaded.sensitive.group_names[0].find("gender=0") != std::string::npos);
    CHECK(loaded.sensitive.group_names[0].find("foreign=0") != std::string::npos);
}

TEST_CASE("report bundle lands on disk with the documented schema") {
    TempDir tmp;
    SyntheticSpec spec;
    spec.n = 400;
    auto raw = generate_synthetic(spec, 4);
    Dataset data{raw.features, raw.sensitive, raw.scores, raw.observed};
    AnalysisConfig a;
    a.depth = 1;
    a.n_points = 15;
    a.seed = 4;
    a.lambdas = {0, 1};
    auto split = DataSplit::make(400, a.train_fraction, a.seed);
    auto comparison = run_comparison(data, a, split);
    auto sweep = partial_sweep(data, a, split, {AdjustTarget::features});

    RunConfig config;
    config.analysis = a;
    config.out_dir = tmp.path.string();
    emit_reports(tmp.path, config, &comparison, &sweep, nullptr, raw.scores.treatment_names);

    // policy and interpretable columns are textual; numeric columns follow
    std::ifstream in(tmp.path / "comparison.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "policy,interpretable,policy_value,cramers_v,p_value,log_bf,"
                    "share_0,share_1,share_2");
    std::string first;
    std::getline(in, first);
    CHECK(first.substr(0, 9) == "observed,");

    CHECK(fs::exists(tmp.path / "sweep.csv"));
    CHECK(fs::exists(tmp.path / "trees.txt"));
    CHECK(fs::exists(tmp.path / "trees.json"));
    CHECK(fs::exists(tmp.path / "run_metadata.json"));
}
