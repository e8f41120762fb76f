#include "fairpol/fair_adjust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairpol {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

std::vector<double> empirical_cdf(const std::vector<double>& values) {
    const std::size_t m = values.size();
    if (m < 2) throw std::invalid_argument("empirical_cdf requires at least 2 values");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto rank = std::upper_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin();
        p[i] = static_cast<double>(rank - 1) / static_cast<double>(m - 1);
    }
    return p;
}

namespace {

GroupCdf build_group_cdf(std::vector<double> sorted) {
    // sorted carries all values of the group, ascending, with duplicates
    GroupCdf cdf;
    const std::size_t m = sorted.size();
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j < m && sorted[j] == sorted[i]) ++j;
        cdf.values.push_back(sorted[i]);
        cdf.counts.push_back(static_cast<std::int64_t>(j - i));
        // Rank of the value = number of entries <= it, i.e. j
        cdf.ps.push_back(static_cast<double>(j - 1) / static_cast<double>(m - 1));
        // p_lower = #{a_j <= previous distinct value} / (m - 1)
        cdf.p_lowers.push_back(static_cast<double>(i) / static_cast<double>(m - 1));
        i = j;
    }
    return cdf;
}

ColumnCdf fit_column(const std::vector<double>& values,
                     const std::vector<std::vector<std::size_t>>& group_idx) {
    ColumnCdf col;
    for (const auto& idx : group_idx) {
        if (idx.size() < 2)
            throw std::invalid_argument("singleton sensitive group: MQ-adjustment undefined");
        std::vector<double> vals;
        vals.reserve(idx.size());
        for (auto i : idx) vals.push_back(values[i]);
        std::sort(vals.begin(), vals.end());
        col.groups.push_back(build_group_cdf(std::move(vals)));
    }
    col.pooled_sorted = values;
    std::sort(col.pooled_sorted.begin(), col.pooled_sorted.end());
    return col;
}

}  // namespace

CdfModel CdfModel::fit(const FeatureTable& features, const SensitiveVector& sensitive) {
    if (features.n() != sensitive.n())
        throw std::invalid_argument("feature/sensitive length mismatch");
    CdfModel model;
    model.n_groups = sensitive.k();
    const auto group_idx = sensitive.group_indices();
    for (const auto& col : features.columns) {
        model.columns.push_back(fit_column(col.values, group_idx));
        model.names.push_back(col.name);
        model.kinds.push_back(col.kind);
    }
    return model;
}

CdfModel CdfModel::fit_scores(const ScoreMatrix& scores, const SensitiveVector& sensitive) {
    FeatureTable as_features;
    for (std::size_t d = 0; d < scores.n_treatments(); ++d) {
        FeatureColumn col;
        col.name = scores.treatment_names[d];
        col.kind = ColumnKind::continuous;
        col.values.resize(scores.n());
        for (std::size_t i = 0; i < scores.n(); ++i) col.values[i] = scores.at(i, d);
        as_features.columns.push_back(std::move(col));
    }
    return fit(as_features, sensitive);
}

double CdfModel::p_value(std::size_t col, int group, double value, Rng& rng) const {
    const GroupCdf& cdf = columns[col].groups[group];
    const auto it = std::lower_bound(cdf.values.begin(), cdf.values.end(), value);
    const std::size_t idx = static_cast<std::size_t>(it - cdf.values.begin());
    if (it != cdf.values.end() && *it == value) {
        if (cdf.counts[idx] > 1) {
            // randomized zeta on (p_lower, p]
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return cdf.ps[idx] - (cdf.ps[idx] - cdf.p_lowers[idx]) * u(rng);
        }
        return cdf.ps[idx];
    }
    // unseen value: interpolate the conditional cdf, clamping at the ends
    if (idx == 0) return 0.0;
    if (idx == cdf.size()) return 1.0;
    const double v0 = cdf.values[idx - 1], v1 = cdf.values[idx];
    const double p0 = cdf.ps[idx - 1], p1 = cdf.ps[idx];
    return p0 + (p1 - p0) * (value - v0) / (v1 - v0);
}

double CdfModel::marginal_quantile(std::size_t col, double p) const {
    const auto& sorted = columns[col].pooled_sorted;
    const std::size_t n = sorted.size();
    const double c = 1.0 + static_cast<double>(n - 1) * std::clamp(p, 0.0, 1.0);
    const std::size_t lambda = std::min(static_cast<std::size_t>(std::floor(c)), n);
    const double kappa = c - static_cast<double>(lambda);
    if (lambda >= n) return sorted[n - 1];
    return (1.0 - kappa) * sorted[lambda - 1] + kappa * sorted[lambda];
}

FeatureTable AdjustedFeatures::cdf_scale_table() const {
    FeatureTable out;
    for (std::size_t j = 0; j < n_features(); ++j) {
        FeatureColumn col;
        col.name = names[j];
        col.kind = ColumnKind::continuous;
        col.values.resize(n());
        for (std::size_t i = 0; i < n(); ++i) col.values[i] = p_values.at(i, j);
        out.columns.push_back(std::move(col));
    }
    return out;
}

FeatureTable AdjustedFeatures::adjusted_table() const {
    FeatureTable out;
    for (std::size_t j = 0; j < n_features(); ++j) {
        FeatureColumn col;
        col.name = names[j];
        col.kind = ColumnKind::continuous;
        col.values.resize(n());
        for (std::size_t i = 0; i < n(); ++i) col.values[i] = adjusted.at(i, j);
        out.columns.push_back(std::move(col));
    }
    return out;
}

namespace {

void apply_column(const CdfModel& model, std::size_t j, const std::vector<double>& values,
                  const SensitiveVector& sensitive, Rng& rng, Matrix& p_out, Matrix& a_out,
                  std::size_t out_col) {
    // draw order: groups ascending, tied cohorts in value order. Ties at a mass
    // point get stratified draws (one per equal sub-interval of the value's cdf
    // interval, randomly assigned), which keeps every draw marginally uniform
    // while pinning the cohort's empirical distribution to the interval.
    const auto group_idx = sensitive.group_indices();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < sensitive.k(); ++s) {
        const GroupCdf& cdf = model.columns[j].groups[s];
        std::vector<std::size_t> order = group_idx[s];
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::size_t t = 0;
        while (t < order.size()) {
            std::size_t e = t;
            while (e < order.size() && values[order[e]] == values[order[t]]) ++e;
            const std::size_t k = e - t;
            const double value = values[order[t]];

            const auto it = std::lower_bound(cdf.values.begin(), cdf.values.end(), value);
            const std::size_t idx = static_cast<std::size_t>(it - cdf.values.begin());
            std::vector<double> ps(k);
            if (it != cdf.values.end() && *it == value && cdf.counts[idx] > 1) {
                const double lo = cdf.p_lowers[idx], hi = cdf.ps[idx];
                for (std::size_t q = 0; q < k; ++q)
                    ps[q] = hi - (hi - lo) * (static_cast<double>(q) + u01(rng)) /
                                     static_cast<double>(k);
                std::shuffle(ps.begin(), ps.end(), rng);
            } else {
                double p;
                if (it != cdf.values.end() && *it == value) {
                    p = cdf.ps[idx];
                } else if (idx == 0) {
                    p = 0.0;
                } else if (idx == cdf.size()) {
                    p = 1.0;
                } else {
                    const double v0 = cdf.values[idx - 1], v1 = cdf.values[idx];
                    const double p0 = cdf.ps[idx - 1], p1 = cdf.ps[idx];
                    p = p0 + (p1 - p0) * (value - v0) / (v1 - v0);
                }
                std::fill(ps.begin(), ps.end(), p);
            }
            for (std::size_t q = 0; q < k; ++q) {
                const std::size_t i = order[t + q];
                p_out.at(i, out_col) = ps[q];
                a_out.at(i, out_col) = model.marginal_quantile(j, ps[q]);
            }
            t = e;
        }
    }
}

}  // namespace

AdjustedFeatures apply_cdf_model(const CdfModel& model, const FeatureTable& features,
                                 const SensitiveVector& sensitive, std::uint64_t seed) {
    AdjustedFeatures out;
    out.names = model.names;
    out.kinds = model.kinds;
    out.rng_seed = seed;
    out.p_values = Matrix(features.n(), features.n_features());
    out.adjusted = Matrix(features.n(), features.n_features());
    for (std::size_t j = 0; j < features.n_features(); ++j) {
        Rng rng = make_stream(seed, j);
        apply_column(model, j, features.columns[j].values, sensitive, rng, out.p_values,
                     out.adjusted, j);
    }
    return out;
}

AdjustedFeatures mq_adjust_table(const FeatureTable& features, const SensitiveVector& sensitive,
                                 std::uint64_t seed) {
    return apply_cdf_model(CdfModel::fit(features, sensitive), features, sensitive, seed);
}

std::pair<std::vector<double>, std::vector<double>> mq_adjust_column(
    const std::vector<double>& values, ColumnKind kind, const SensitiveVector& sensitive,
    Rng& rng) {
    FeatureTable table;
    FeatureColumn col;
    col.name = "value";
    col.kind = kind;
    col.values = values;
    table.columns.push_back(std::move(col));
    const CdfModel model = CdfModel::fit(table, sensitive);
    Matrix p(values.size(), 1), a(values.size(), 1);
    apply_column(model, 0, values, sensitive, rng, p, a, 0);
    return {std::move(p.data), std::move(a.data)};
}

ScoreMatrix apply_cdf_model_scores(const CdfModel& model, const ScoreMatrix& scores,
                                   const SensitiveVector& sensitive, std::uint64_t seed) {
    ScoreMatrix out = scores;
    Matrix p(scores.n(), 1), a(scores.n(), 1);
    for (std::size_t d = 0; d < scores.n_treatments(); ++d) {
        Rng rng = make_stream(seed, d);
        std::vector<double> column(scores.n());
        for (std::size_t i = 0; i < scores.n(); ++i) column[i] = scores.at(i, d);
        apply_column(model, d, column, sensitive, rng, p, a, 0);
        for (std::size_t i = 0; i < scores.n(); ++i) out.values.at(i, d) = a.at(i, 0);
    }
    return out;
}

ScoreMatrix mq_adjust_scores(const ScoreMatrix& scores, const SensitiveVector& sensitive,
                             std::uint64_t seed) {
    return apply_cdf_model_scores(CdfModel::fit_scores(scores, sensitive), scores, sensitive, seed);
}

double cq_lookup(double p, const CqPairs& pairs) {
    if (pairs.ps.empty()) throw std::invalid_argument("cq_lookup on empty pairs");
    const auto it = std::lower_bound(pairs.ps.begin(), pairs.ps.end(), p);
    const std::size_t idx = static_cast<std::size_t>(it - pairs.ps.begin());
    if (it != pairs.ps.end() && *it == p) return pairs.values[idx];
    if (idx == 0) return pairs.values.front();
    if (idx == pairs.ps.size()) return pairs.values.back();
    const double p0 = pairs.ps[idx - 1], p1 = pairs.ps[idx];
    const double a0 = pairs.values[idx - 1], a1 = pairs.values[idx];
    return a0 + (a1 - a0) / (p1 - p0) * (p - p0);
}

FeatureTable blend_features(const FeatureTable& original, const AdjustedFeatures& adjusted,
                            double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    FeatureTable out;
    for (std::size_t j = 0; j < original.n_features(); ++j) {
        FeatureColumn col;
        col.name = original.columns[j].name;
        col.kind = ColumnKind::continuous;  // blended columns are continuous downstream
        col.values.resize(original.n());
        for (std::size_t i = 0; i < original.n(); ++i)
            col.values[i] = (1.0 - lambda) * original.columns[j].values[i] +
                            lambda * adjusted.adjusted.at(i, j);
        out.columns.push_back(std::move(col));
    }
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        // consume every observation tied at the current value before comparing
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace fairpol
