#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fairpol {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

enum class ColumnKind { continuous, discrete };

struct FeatureColumn {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<double> values;
    // strictly increasing list of admissible values; discrete columns only
    std::vector<double> support;
};

struct FeatureTable {
    std::vector<FeatureColumn> columns;

    std::size_t n() const { return columns.empty() ? 0 : columns.front().values.size(); }
    std::size_t n_features() const { return columns.size(); }
    const FeatureColumn& column(std::size_t j) const { return columns[j]; }
    std::vector<std::string> names() const;
    int index_of(const std::string& name) const;
};

struct SensitiveVector {
    std::vector<int> labels;           // values in {0..K-1}
    std::vector<std::string> group_names;

    std::size_t n() const { return labels.size(); }
    int k() const { return static_cast<int>(group_names.size()); }
    std::vector<std::size_t> group_sizes() const;
    std::vector<std::vector<std::size_t>> group_indices() const;
};

struct ScoreMatrix {
    Matrix values;  // n x (M+1)
    std::vector<std::string> treatment_names;

    std::size_t n() const { return values.rows; }
    std::size_t n_treatments() const { return values.cols; }
    double at(std::size_t i, std::size_t d) const { return values.at(i, d); }
};

struct Assignment {
    std::vector<int> treatments;

    std::size_t n() const { return treatments.size(); }
};

struct NuisanceEstimates {
    Matrix mu;  // outcome regressions, n x (M+1)
    Matrix e;   // propensities, n x (M+1)
    std::vector<double> y;
    std::vector<int> d_obs;

    std::size_t n() const { return mu.rows; }
    std::size_t n_treatments() const { return mu.cols; }
};

// Report-style validation: returns one message per violation, empty means valid.
std::vector<std::string> validate_dataset(const FeatureTable& features,
                                          const SensitiveVector& sensitive,
                                          const ScoreMatrix& scores);

}  // namespace fairpol
