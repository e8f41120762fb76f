#pragma once

#include "fairpol/data_model.hpp"

#include <random>

namespace testutil {

inline fairpol::FeatureColumn cont_col(std::string name, std::vector<double> v) {
    fairpol::FeatureColumn c;
    c.name = std::move(name);
    c.kind = fairpol::ColumnKind::continuous;
    c.values = std::move(v);
    return c;
}

inline fairpol::FeatureColumn disc_col(std::string name, std::vector<double> v,
                                       std::vector<double> support) {
    fairpol::FeatureColumn c;
    c.name = std::move(name);
    c.kind = fairpol::ColumnKind::discrete;
    c.values = std::move(v);
    c.support = std::move(support);
    return c;
}

inline fairpol::SensitiveVector groups(std::vector<int> labels, int k) {
    fairpol::SensitiveVector s;
    s.labels = std::move(labels);
    for (int g = 0; g < k; ++g) s.group_names.push_back("g" + std::to_string(g));
    return s;
}

inline fairpol::ScoreMatrix score_matrix(std::size_t n, std::size_t m,
                                         const std::vector<double>& flat) {
    fairpol::ScoreMatrix s;
    s.values = fairpol::Matrix(n, m);
    s.values.data = flat;
    for (std::size_t d = 0; d < m; ++d) s.treatment_names.push_back("t" + std::to_string(d));
    return s;
}

}  // namespace testutil
