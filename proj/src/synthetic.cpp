#include "fairpol/synthetic.hpp"

#include "fairpol/fair_adjust.hpp"

#include <cmath>
#include <stdexcept>

namespace fairpol {

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.n < 100) throw std::invalid_argument("synthetic spec requires n >= 100");
    const int k = static_cast<int>(spec.group_probs.size());
    double prob_sum = 0.0;
    for (double p : spec.group_probs) prob_sum += p;
    if (std::fabs(prob_sum - 1.0) > 1e-9)
        throw std::invalid_argument("group probabilities must sum to 1");

    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SyntheticData data;
    data.sensitive.labels.resize(spec.n);
    data.sensitive.group_names = {"male_native", "male_foreign", "female_native",
                                  "female_foreign"};
    data.sensitive.group_names.resize(k);
    for (int s = 0; s < k; ++s)
        if (data.sensitive.group_names[s].empty())
            data.sensitive.group_names[s] = "group_" + std::to_string(s);

    FeatureColumn age{"age", ColumnKind::continuous, {}, {}};
    FeatureColumn earn{"earnings", ColumnKind::continuous, {}, {}};
    FeatureColumn degree{"degree", ColumnKind::discrete, {}, {0.0, 1.0}};
    age.values.resize(spec.n);
    earn.values.resize(spec.n);
    degree.values.resize(spec.n);

    const std::size_t m = 3;
    data.scores.values = Matrix(spec.n, m);
    data.scores.treatment_names = {"none", "vocational", "computer"};
    data.observed.treatments.resize(spec.n);

    Matrix mean_sum(k, m);
    std::vector<std::int64_t> group_n(k, 0);

    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = unif(rng);
        int s = 0;
        double acc = 0.0;
        for (int g = 0; g < k; ++g) {
            acc += spec.group_probs[g];
            if (u < acc || g == k - 1) {
                s = g;
                break;
            }
        }
        data.sensitive.labels[i] = s;
        ++group_n[s];

        age.values[i] = spec.age_mean + spec.age_shift[s] + spec.age_sd * normal(rng);
        earn.values[i] = unif(rng) < spec.zero_earn_prob[s]
                             ? 0.0
                             : std::exp(spec.earn_log_mean + spec.earn_shift[s] +
                                        spec.earn_log_sd * normal(rng));
        degree.values[i] = unif(rng) < spec.degree_prob[s] ? 1.0 : 0.0;

        // noise-free treatment effects relative to no program
        const double gain_voc = 1.5 * std::tanh((age.values[i] - 40.0) / 8.0);
        const double gain_comp = 0.8 * std::tanh((25000.0 - earn.values[i]) / 20000.0) +
                                 0.3 * (1.0 - degree.values[i]);
        const double clean[3] = {spec.score_base, spec.score_base + gain_voc,
                                 spec.score_base + gain_comp};
        for (std::size_t d = 0; d < m; ++d) {
            mean_sum.at(s, d) += clean[d];
            data.scores.values.at(i, d) = clean[d] + spec.score_noise_sd * normal(rng);
        }

        // caseworker-like observed assignment, mostly no program
        const double v = unif(rng);
        const double p_voc = s < 2 ? 0.20 : 0.10;
        data.observed.treatments[i] = v < 0.65 ? 0 : (v < 0.65 + p_voc ? 1 : 2);
    }

    data.true_group_score_means = Matrix(k, m);
    for (int s = 0; s < k; ++s)
        for (std::size_t d = 0; d < m; ++d)
            data.true_group_score_means.at(s, d) =
                group_n[s] > 0 ? mean_sum.at(s, d) / static_cast<double>(group_n[s]) : 0.0;

    data.features.columns = {std::move(age), std::move(earn), std::move(degree)};
    return data;
}

}  // namespace fairpol
