#pragma once

#include "fairpol/data_model.hpp"

#include <cstdint>

namespace fairpol {

struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;  // rows = sensitive groups, cols = treatments

    std::size_t n_rows() const { return counts.size(); }
    std::size_t n_cols() const { return counts.empty() ? 0 : counts.front().size(); }
    std::int64_t total() const;
    std::vector<std::int64_t> row_totals() const;
    std::vector<std::int64_t> col_totals() const;
};

struct FairnessReport {
    double cramers_v = 0.0;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double log_bf = 0.0;  // natural log; -inf for degenerate tables
    bool degenerate = false;
};

ContingencyTable contingency(const Assignment& assignment, const SensitiveVector& sensitive,
                             std::size_t n_treatments);

// Pearson chi2 over nonzero rows/columns; degenerate tables report V=0, p=1.
FairnessReport cramers_v(const ContingencyTable& table);

// Log Bayes factor of dependence (separate multinomial per row, Dirichlet priors)
// against independence (one shared multinomial). Positive favors dependence.
double log_bayes_factor(const ContingencyTable& table, double prior_concentration = 1.0);

FairnessReport fairness_report(const ContingencyTable& table, double prior_concentration = 1.0);

// Regularized upper incomplete gamma Q(a, x), relative error <= 1e-10.
double gamma_q(double a, double x);

double chi2_upper_tail(double chi2, int dof);

}  // namespace fairpol
