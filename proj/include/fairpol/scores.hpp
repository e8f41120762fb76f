#pragma once

#include "fairpol/data_model.hpp"
#include "fairpol/fairness_metrics.hpp"

namespace fairpol {

struct PolicyEvalReport {
    double policy_value = 0.0;
    std::vector<double> program_shares;
    FairnessReport fairness;
};

// Score columns are the outcome regressions themselves.
ScoreMatrix iapo_scores(const NuisanceEstimates& nuisance);

// Doubly robust scores: mu_d + 1{d_obs=d} * (y - mu_d) / e_d.
ScoreMatrix aipw_scores(const NuisanceEstimates& nuisance);

double policy_value(const Assignment& assignment, const ScoreMatrix& scores);

// Per-row argmax; ties broken by lowest treatment index.
Assignment blackbox_policy(const ScoreMatrix& scores);

// Everyone gets the treatment with the best column mean.
std::pair<Assignment, int> all_in_one_policy(const ScoreMatrix& scores);

ScoreMatrix blend_scores(const ScoreMatrix& original, const ScoreMatrix& adjusted, double lambda);

std::vector<double> program_shares(const Assignment& assignment, std::size_t n_treatments);

PolicyEvalReport evaluate_policy(const Assignment& assignment, const ScoreMatrix& scores,
                                 const SensitiveVector& sensitive);

}  // namespace fairpol
