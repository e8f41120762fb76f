#include "fairpol/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairpol {

std::vector<std::string> FeatureTable::names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

int FeatureTable::index_of(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j].name == name) return static_cast<int>(j);
    return -1;
}

std::vector<std::size_t> SensitiveVector::group_sizes() const {
    std::vector<std::size_t> sizes(k(), 0);
    for (int s : labels) ++sizes[s];
    return sizes;
}

std::vector<std::vector<std::size_t>> SensitiveVector::group_indices() const {
    std::vector<std::vector<std::size_t>> idx(k());
    for (std::size_t i = 0; i < labels.size(); ++i) idx[labels[i]].push_back(i);
    return idx;
}

std::vector<std::string> validate_dataset(const FeatureTable& features,
                                          const SensitiveVector& sensitive,
                                          const ScoreMatrix& scores) {
    std::vector<std::string> report;
    auto add = [&report](const std::string& msg) { report.push_back(msg); };

    const std::size_t n = features.n();
    if (n < 2) add("feature table must have at least 2 observations");

    for (const auto& col : features.columns) {
        if (col.values.size() != n) {
            add("column '" + col.name + "' has " + std::to_string(col.values.size()) +
                " entries, expected " + std::to_string(n));
        }
        for (std::size_t i = 0; i < col.values.size(); ++i) {
            if (!std::isfinite(col.values[i])) {
                add("non-finite value in column '" + col.name + "' at row " + std::to_string(i));
                break;
            }
        }
        if (col.kind == ColumnKind::discrete) {
            if (!std::is_sorted(col.support.begin(), col.support.end()) ||
                std::adjacent_find(col.support.begin(), col.support.end()) != col.support.end()) {
                add("support of discrete column '" + col.name + "' is not strictly increasing");
            }
            for (std::size_t i = 0; i < col.values.size(); ++i) {
                if (!std::binary_search(col.support.begin(), col.support.end(), col.values[i])) {
                    add("unsupported discrete value in column '" + col.name + "' at row " +
                        std::to_string(i));
                    break;
                }
            }
        }
    }

    if (sensitive.n() != n)
        add("sensitive vector length " + std::to_string(sensitive.n()) +
            " does not match n=" + std::to_string(n));
    if (sensitive.k() < 1) add("sensitive vector must define at least one group");
    for (std::size_t i = 0; i < sensitive.labels.size(); ++i) {
        if (sensitive.labels[i] < 0 || sensitive.labels[i] >= sensitive.k()) {
            add("sensitive label out of range at row " + std::to_string(i));
            break;
        }
    }
    if (sensitive.n() == n && sensitive.k() >= 1) {
        auto sizes = sensitive.group_sizes();
        for (int s = 0; s < sensitive.k(); ++s) {
            if (sizes[s] == 0) add("empty sensitive group '" + sensitive.group_names[s] + "'");
        }
    }

    if (scores.n() != n)
        add("score matrix has " + std::to_string(scores.n()) + " rows, expected " +
            std::to_string(n));
    if (scores.n_treatments() < 2) add("score matrix must have at least 2 treatment columns");
    for (std::size_t i = 0; i < scores.n(); ++i) {
        for (std::size_t d = 0; d < scores.n_treatments(); ++d) {
            if (!std::isfinite(scores.at(i, d))) {
                std::ostringstream os;
                os << "non-finite score at row " << i << ", treatment column " << d;
                add(os.str());
                return report;
            }
        }
    }
    return report;
}

}  // namespace fairpol
