#pragma once

#include "fairpol/data_model.hpp"

#include <cstdint>

namespace fairpol {

// Desk-scale stand-in for an administrative dataset: two sensitive binaries
// (four groups), an age-like feature, an earnings-like feature with a mass
// point at zero, a binary degree indicator, and three treatment scores whose
// unconstrained optimum differs across groups.
struct SyntheticSpec {
    std::size_t n = 10000;
    std::vector<double> group_probs = {0.3, 0.2, 0.3, 0.2};
    std::vector<double> age_shift = {-6.0, -2.0, 2.0, 6.0};
    double age_mean = 40.0;
    double age_sd = 8.0;
    std::vector<double> zero_earn_prob = {0.10, 0.20, 0.30, 0.40};
    std::vector<double> earn_shift = {0.35, 0.10, -0.10, -0.35};
    double earn_log_mean = 10.6;  // ~ 40k
    double earn_log_sd = 0.5;
    std::vector<double> degree_prob = {0.70, 0.55, 0.45, 0.30};
    double score_base = 17.0;
    double score_noise_sd = 0.25;
};

struct SyntheticData {
    FeatureTable features;
    SensitiveVector sensitive;
    ScoreMatrix scores;
    Assignment observed;
    // noise-free group-conditional score means, one row per group
    Matrix true_group_score_means;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace fairpol
