#include "fairpol/fairness_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fairpol {

std::int64_t ContingencyTable::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (auto c : row) t += c;
    return t;
}

std::vector<std::int64_t> ContingencyTable::row_totals() const {
    std::vector<std::int64_t> t(n_rows(), 0);
    for (std::size_t r = 0; r < n_rows(); ++r)
        t[r] = std::accumulate(counts[r].begin(), counts[r].end(), std::int64_t{0});
    return t;
}

std::vector<std::int64_t> ContingencyTable::col_totals() const {
    std::vector<std::int64_t> t(n_cols(), 0);
    for (const auto& row : counts)
        for (std::size_t c = 0; c < row.size(); ++c) t[c] += row[c];
    return t;
}

ContingencyTable contingency(const Assignment& assignment, const SensitiveVector& sensitive,
                             std::size_t n_treatments) {
    if (assignment.n() != sensitive.n())
        throw std::invalid_argument("assignment/sensitive length mismatch");
    ContingencyTable table;
    table.counts.assign(sensitive.k(), std::vector<std::int64_t>(n_treatments, 0));
    for (std::size_t i = 0; i < assignment.n(); ++i)
        ++table.counts[sensitive.labels[i]][assignment.treatments[i]];
    return table;
}

namespace {

// Lanczos approximation, good to ~1e-15.
double lgamma_fn(double x) { return std::lgamma(x); }

// Regularized lower incomplete gamma via series expansion.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lgamma_fn(a));
}

// Regularized upper incomplete gamma via Lentz continued fraction.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - lgamma_fn(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q requires x >= 0, a > 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi2_upper_tail(double chi2, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

namespace {

// Drops all-zero rows and columns; the reduced table drives chi2 and V.
ContingencyTable reduce(const ContingencyTable& table) {
    auto row_tot = table.row_totals();
    auto col_tot = table.col_totals();
    ContingencyTable out;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (row_tot[r] == 0) continue;
        std::vector<std::int64_t> row;
        for (std::size_t c = 0; c < table.n_cols(); ++c)
            if (col_tot[c] > 0) row.push_back(table.counts[r][c]);
        out.counts.push_back(std::move(row));
    }
    return out;
}

}  // namespace

FairnessReport cramers_v(const ContingencyTable& table) {
    FairnessReport report;
    const ContingencyTable red = reduce(table);
    const std::size_t r = red.n_rows();
    const std::size_t c = red.n_cols();
    if (r < 2 || c < 2) {
        report.degenerate = true;
        report.log_bf = -std::numeric_limits<double>::infinity();
        return report;
    }
    const auto row_tot = red.row_totals();
    const auto col_tot = red.col_totals();
    const double n = static_cast<double>(red.total());
    double chi2 = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double expected = static_cast<double>(row_tot[i]) * col_tot[j] / n;
            const double diff = static_cast<double>(red.counts[i][j]) - expected;
            chi2 += diff * diff / expected;
        }
    }
    report.chi2 = chi2;
    report.dof = static_cast<int>((r - 1) * (c - 1));
    report.p_value = chi2_upper_tail(chi2, report.dof);
    const double c_min = static_cast<double>(std::min(r, c));
    report.cramers_v = std::sqrt(chi2 / (n * (c_min - 1.0)));
    return report;
}

double log_bayes_factor(const ContingencyTable& table, double prior_concentration) {
    if (prior_concentration <= 0.0)
        throw std::invalid_argument("prior concentration must be positive");
    const ContingencyTable red = reduce(table);
    const std::size_t r = red.n_rows();
    const std::size_t c = red.n_cols();
    if (r < 2 || c < 2) return -std::numeric_limits<double>::infinity();
    const double a = prior_concentration;
    const auto row_tot = red.row_totals();
    const auto col_tot = red.col_totals();
    const double n = static_cast<double>(red.total());

    // H1: independent multinomial per row, Dirichlet(a,...,a) prior on each.
    double log_m1 = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        log_m1 += lgamma_fn(c * a) - lgamma_fn(static_cast<double>(row_tot[i]) + c * a);
        for (std::size_t j = 0; j < c; ++j)
            log_m1 += lgamma_fn(static_cast<double>(red.counts[i][j]) + a) - lgamma_fn(a);
    }

    // H0: one shared multinomial; column concentrations aggregate over rows.
    const double a0 = static_cast<double>(r) * a;
    double log_m0 = lgamma_fn(c * a0) - lgamma_fn(n + c * a0);
    for (std::size_t j = 0; j < c; ++j)
        log_m0 += lgamma_fn(static_cast<double>(col_tot[j]) + a0) - lgamma_fn(a0);

    return log_m1 - log_m0;
}

FairnessReport fairness_report(const ContingencyTable& table, double prior_concentration) {
    FairnessReport report = cramers_v(table);
    if (!report.degenerate) report.log_bf = log_bayes_factor(table, prior_concentration);
    return report;
}

}  // namespace fairpol
