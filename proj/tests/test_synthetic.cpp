#include "fairpol/synthetic.hpp"
#include "fairpol/data_model.hpp"

#include <doctest.h>

#include <cmath>

using namespace fairpol;

TEST_CASE("synthetic draws are reproducible and seed-sensitive") {
    SyntheticSpec spec;
    spec.n = 500;
    auto a = generate_synthetic(spec, 1);
    auto b = generate_synthetic(spec, 1);
    auto c = generate_synthetic(spec, 2);
    CHECK(a.features.columns[0].values == b.features.columns[0].values);
    CHECK(a.scores.values.data == b.scores.values.data);
    CHECK(a.observed.treatments == b.observed.treatments);
    CHECK(a.features.columns[0].values != c.features.columns[0].values);
}

TEST_CASE("synthetic output passes validation and matches the documented shape") {
    SyntheticSpec spec;
    spec.n = 1000;
    auto data = generate_synthetic(spec, 9);
    CHECK(validate_dataset(data.features, data.sensitive, data.scores).empty());
    CHECK(data.features.n() == 1000);
    CHECK(data.sensitive.k() == 4);
    CHECK(data.scores.n_treatments() == 3);
    CHECK(data.observed.n() == 1000);
    CHECK(data.true_group_score_means.rows == 4);
    CHECK(data.true_group_score_means.cols == 3);

    CHECK(data.features.index_of("age") >= 0);
    CHECK(data.features.index_of("earnings") >= 0);
    const int deg = data.features.index_of("degree");
    REQUIRE(deg >= 0);
    CHECK(data.features.columns[deg].kind == ColumnKind::discrete);

    // earnings carry a mass point at zero by design
    const int earn = data.features.index_of("earnings");
    int zeros = 0;
    for (double v : data.features.columns[earn].values)
        if (v == 0.0) zeros++;
    CHECK(zeros > 100);
}

TEST_CASE("group score profiles differ so fairness actually binds") {
    auto data = generate_synthetic({.n = 2000}, 13);
    // the best treatment by true means is not the same across groups
    auto argmax = [&](int g) {
        int best = 0;
        for (int d = 1; d < 3; ++d)
            if (data.true_group_score_means.at(g, d) > data.true_group_score_means.at(g, best))
                best = d;
        return best;
    };
    bool differs = false;
    for (int g = 1; g < 4; ++g) differs = differs || argmax(g) != argmax(0);
    CHECK(differs);
}

TEST_CASE("spec validation") {
    SyntheticSpec bad;
    bad.n = 10;
    CHECK_THROWS(generate_synthetic(bad, 1));
    SyntheticSpec bad_probs;
    bad_probs.group_probs = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS(generate_synthetic(bad_probs, 1));
}
