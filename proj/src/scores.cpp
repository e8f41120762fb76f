#include "fairpol/scores.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairpol {

ScoreMatrix iapo_scores(const NuisanceEstimates& nuisance) {
    ScoreMatrix out;
    out.values = nuisance.mu;
    out.treatment_names.resize(nuisance.n_treatments());
    for (std::size_t d = 0; d < nuisance.n_treatments(); ++d)
        out.treatment_names[d] = "treatment_" + std::to_string(d);
    return out;
}

ScoreMatrix aipw_scores(const NuisanceEstimates& nuisance) {
    const std::size_t n = nuisance.n();
    const std::size_t m = nuisance.n_treatments();
    ScoreMatrix out;
    out.values = Matrix(n, m);
    out.treatment_names.resize(m);
    for (std::size_t d = 0; d < m; ++d) out.treatment_names[d] = "treatment_" + std::to_string(d);
    for (std::size_t i = 0; i < n; ++i) {
        const int d_obs = nuisance.d_obs[i];
        for (std::size_t d = 0; d < m; ++d) {
            double g = nuisance.mu.at(i, d);
            if (static_cast<int>(d) == d_obs) {
                const double e = nuisance.e.at(i, d);
                if (e <= 0.0)
                    throw std::invalid_argument("zero propensity for observed treatment at row " +
                                                std::to_string(i));
                g += (nuisance.y[i] - nuisance.mu.at(i, d)) / e;
            }
            out.values.at(i, d) = g;
        }
    }
    return out;
}

double policy_value(const Assignment& assignment, const ScoreMatrix& scores) {
    if (assignment.n() != scores.n())
        throw std::invalid_argument("assignment/score length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.n(); ++i) sum += scores.at(i, assignment.treatments[i]);
    return sum / static_cast<double>(scores.n());
}

Assignment blackbox_policy(const ScoreMatrix& scores) {
    Assignment out;
    out.treatments.resize(scores.n());
    for (std::size_t i = 0; i < scores.n(); ++i) {
        int best = 0;
        for (std::size_t d = 1; d < scores.n_treatments(); ++d)
            if (scores.at(i, d) > scores.at(i, best)) best = static_cast<int>(d);
        out.treatments[i] = best;
    }
    return out;
}

std::pair<Assignment, int> all_in_one_policy(const ScoreMatrix& scores) {
    int best = 0;
    double best_sum = 0.0;
    for (std::size_t d = 0; d < scores.n_treatments(); ++d) {
        double sum = 0.0;
        for (std::size_t i = 0; i < scores.n(); ++i) sum += scores.at(i, d);
        if (d == 0 || sum > best_sum) {
            best = static_cast<int>(d);
            best_sum = sum;
        }
    }
    Assignment out;
    out.treatments.assign(scores.n(), best);
    return {out, best};
}

ScoreMatrix blend_scores(const ScoreMatrix& original, const ScoreMatrix& adjusted, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    if (original.n() != adjusted.n() || original.n_treatments() != adjusted.n_treatments())
        throw std::invalid_argument("score matrix shape mismatch");
    ScoreMatrix out = original;
    for (std::size_t i = 0; i < out.values.data.size(); ++i)
        out.values.data[i] = (1.0 - lambda) * original.values.data[i] +
                             lambda * adjusted.values.data[i];
    return out;
}

std::vector<double> program_shares(const Assignment& assignment, std::size_t n_treatments) {
    std::vector<double> shares(n_treatments, 0.0);
    for (int d : assignment.treatments) ++shares[d];
    for (auto& s : shares) s /= static_cast<double>(assignment.n());
    return shares;
}

PolicyEvalReport evaluate_policy(const Assignment& assignment, const ScoreMatrix& scores,
                                 const SensitiveVector& sensitive) {
    PolicyEvalReport report;
    report.policy_value = policy_value(assignment, scores);
    report.program_shares = program_shares(assignment, scores.n_treatments());
    report.fairness = fairness_report(contingency(assignment, sensitive, scores.n_treatments()));
    return report;
}

}  // namespace fairpol
