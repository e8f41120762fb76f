#include "fairpol/fairness_metrics.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fairpol;

namespace {
ContingencyTable table(std::vector<std::vector<std::int64_t>> counts) {
    ContingencyTable t;
    t.counts = std::move(counts);
    return t;
}
}  // namespace

TEST_CASE("contingency counts cross-tabulate assignment by group") {
    Assignment a{{0, 1, 1, 0, 1}};
    auto sens = testutil::groups({0, 0, 1, 1, 1}, 2);
    auto t = contingency(a, sens, 2);
    CHECK(t.counts == std::vector<std::vector<std::int64_t>>{{1, 1}, {1, 2}});
    CHECK(t.total() == 5);
    CHECK(t.row_totals() == std::vector<std::int64_t>{2, 3});
    CHECK(t.col_totals() == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("association measure on reference tables") {
    auto perfect = cramers_v(table({{10, 0}, {0, 10}}));
    CHECK(perfect.cramers_v == doctest::Approx(1.0));
    CHECK(perfect.dof == 1);

    auto indep = cramers_v(table({{5, 5}, {5, 5}}));
    CHECK(indep.cramers_v == doctest::Approx(0.0));
    CHECK(indep.p_value == doctest::Approx(1.0));

    auto mid = cramers_v(table({{20, 10}, {10, 20}}));
    CHECK(mid.cramers_v == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    // chi2 = 60 * (1/3)^2 = 20/3 for a 2x2
    CHECK(mid.chi2 == doctest::Approx(60.0 / 9.0));
}

TEST_CASE("degenerate tables are flagged, not crashed") {
    auto one_col = fairness_report(table({{7}, {9}}));
    CHECK(one_col.degenerate);
    CHECK(one_col.cramers_v == 0.0);
    CHECK(one_col.p_value == 1.0);
    CHECK(std::isinf(one_col.log_bf));
    CHECK(one_col.log_bf < 0);

    // zero rows/columns are dropped before computing anything
    auto padded = cramers_v(table({{20, 0, 10}, {0, 0, 0}, {10, 0, 20}}));
    CHECK(padded.cramers_v == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("upper tail of the chi-square distribution") {
    // dof 2 has the closed form exp(-x/2)
    for (double x : {0.5, 1.0, 4.0, 10.0})
        CHECK(chi2_upper_tail(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-10));
    // classical critical values
    CHECK(chi2_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_upper_tail(9.487729036781154, 4) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_upper_tail(0.0, 3) == doctest::Approx(1.0));
    // erfc relation for dof 1
    CHECK(chi2_upper_tail(1.0, 1) == doctest::Approx(std::erfc(1.0 / std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("regularized gamma Q at known points") {
    CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(gamma_q(2.0, 3.0) == doctest::Approx(std::exp(-3.0) * 4.0).epsilon(1e-10));
    CHECK(gamma_q(5.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("log Bayes factor matches a Monte Carlo oracle on small tables") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> cell(0, 5);
    for (int rep = 0; rep < 3; ++rep) {
        ContingencyTable t = table({{cell(rng), cell(rng)}, {cell(rng) + 1, cell(rng)}});
        const double exact = log_bayes_factor(t, 1.0);
        const double mc = testutil::mc_log_bayes_factor(t, 1.0, 200000, 100 + rep);
        CHECK(std::abs(exact - mc) < 0.1);
    }
}

TEST_CASE("log Bayes factor favors dependence only for associated tables") {
    CHECK(log_bayes_factor(table({{30, 0}, {0, 30}})) > 2.0);
    CHECK(log_bayes_factor(table({{15, 15}, {15, 15}})) < 0.0);
}
