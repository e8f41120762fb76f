#pragma once

#include "fairpol/data_model.hpp"

#include <cstdint>
#include <random>

namespace fairpol {

using Rng = std::mt19937_64;

// Independent generator stream derived from (seed, stream index).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// Empirical cdf after Hyndman's definition 7: min -> 0, max -> 1, even spacing,
// p_i = (Rank(a_i) - 1) / (m - 1) with Rank = #{j : a_j <= a_i}.
std::vector<double> empirical_cdf(const std::vector<double>& values);

// Distinct-value cdf table for one (column, group) cell.
struct GroupCdf {
    std::vector<double> values;      // distinct, ascending
    std::vector<double> ps;          // Hyndman cdf value at each distinct value
    std::vector<double> p_lowers;    // lower bound of the tie-randomization interval
    std::vector<std::int64_t> counts;

    std::size_t size() const { return values.size(); }
};

struct ColumnCdf {
    std::vector<GroupCdf> groups;
    std::vector<double> pooled_sorted;  // all values, ascending, with duplicates
};

// Houses the fitted conditional cdfs F_{A|S} and the pooled marginal quantile function.
struct CdfModel {
    std::vector<ColumnCdf> columns;
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;
    int n_groups = 0;

    static CdfModel fit(const FeatureTable& features, const SensitiveVector& sensitive);
    static CdfModel fit_scores(const ScoreMatrix& scores, const SensitiveVector& sensitive);

    // Conditional cdf draw; tied values get a uniform draw on (p_lower, p].
    double p_value(std::size_t col, int group, double value, Rng& rng) const;

    // Pooled empirical quantile with linear interpolation.
    double marginal_quantile(std::size_t col, double p) const;
};

struct AdjustedFeatures {
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;
    Matrix p_values;  // n x G, conditional cdf draws incl. randomized zeta
    Matrix adjusted;  // n x G, marginal-quantile images
    std::uint64_t rng_seed = 0;

    std::size_t n() const { return p_values.rows; }
    std::size_t n_features() const { return p_values.cols; }

    // The cdf-scale view used for tree fitting (columns carry the original names).
    FeatureTable cdf_scale_table() const;
    FeatureTable adjusted_table() const;
};

// One column of Algorithm-style MQ adjustment; returns (p, adjusted).
std::pair<std::vector<double>, std::vector<double>> mq_adjust_column(
    const std::vector<double>& values, ColumnKind kind, const SensitiveVector& sensitive,
    Rng& rng);

// Columnwise MQ adjustment; column j consumes stream (seed, j).
AdjustedFeatures mq_adjust_table(const FeatureTable& features, const SensitiveVector& sensitive,
                                 std::uint64_t seed);

// Applies a fitted model to (possibly fresh) data; in-sample this reproduces
// mq_adjust_table exactly.
AdjustedFeatures apply_cdf_model(const CdfModel& model, const FeatureTable& features,
                                 const SensitiveVector& sensitive, std::uint64_t seed);

// Every score column treated as a continuous feature.
ScoreMatrix mq_adjust_scores(const ScoreMatrix& scores, const SensitiveVector& sensitive,
                             std::uint64_t seed);

ScoreMatrix apply_cdf_model_scores(const CdfModel& model, const ScoreMatrix& scores,
                                   const SensitiveVector& sensitive, std::uint64_t seed);

// Observation-level (value, p) pairs of one group, sorted ascending by p.
struct CqPairs {
    std::vector<double> values;
    std::vector<double> ps;
};

// Inverse conditional cdf: exact match returns its value, otherwise linear
// interpolation between the bracketing pairs; out-of-range p clamps.
double cq_lookup(double p, const CqPairs& pairs);

FeatureTable blend_features(const FeatureTable& original, const AdjustedFeatures& adjusted,
                            double lambda);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace fairpol
