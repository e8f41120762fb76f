#pragma once

#include "fairpol/analysis.hpp"
#include "fairpol/synthetic.hpp"

#include <filesystem>

namespace fairpol {

struct RunConfig {
    // input files; empty paths mean "use the synthetic block"
    std::string features_path;
    std::string scores_path;
    std::string sensitive_path;
    std::string observed_path;
    std::vector<std::string> discrete_features;

    bool use_synthetic = false;
    SyntheticSpec synthetic;

    AnalysisConfig analysis;
    AdjustTarget target = AdjustTarget::features;
    std::vector<int> cluster_k_range = {2, 3, 4, 5, 6};
    double cluster_min_share = 0.01;
    std::string out_dir = ".";

    static RunConfig from_json_file(const std::filesystem::path& path);
    static RunConfig from_json(const std::string& text);
    std::string to_json() const;
};

// CSV: comma separated, header row, '.' decimal, shortest round-trip floats.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable read_csv(const std::filesystem::path& path);

std::string format_double(double v);

Dataset load_dataset(const RunConfig& config);

void write_dataset(const std::filesystem::path& dir, const SyntheticData& data);

void emit_reports(const std::filesystem::path& dir, const RunConfig& config,
                  const ComparisonResult* comparison, const std::vector<SweepPoint>* sweep,
                  const ClusterSummary* clusters,
                  const std::vector<std::string>& treatment_names);

}  // namespace fairpol
