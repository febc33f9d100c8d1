#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "honam/metrics.hpp"
#include "honam/random.hpp"
#include "oracles.hpp"

using namespace honam;

TEST(Regression, TrivialCases) {
    const std::vector<double> y{1, 2, 3, 4};
    EXPECT_EQ(*r_squared(y, y), 1.0);
    EXPECT_EQ(*r_absolute(y, y), 1.0);
    const std::vector<double> mean(4, 2.5);
    EXPECT_NEAR(*r_squared(y, mean), 0.0, 1e-15);
    EXPECT_EQ(*r_absolute(y, mean), 0.0);
    EXPECT_FALSE(r_squared(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}).has_value());
    EXPECT_THROW(r_squared(std::vector<double>{1}, std::vector<double>{1}), ContractError);
    EXPECT_THROW(r_squared(y, std::vector<double>{1, 2}), DimensionError);
}

TEST(Regression, HandComputedValues) {
    const std::vector<double> y{1, 2, 3, 4}, yhat{1.5, 2, 2.5, 4};
    // SSE 0.5, SST 5.
    EXPECT_NEAR(*r_squared(y, yhat), 0.9, 1e-15);
    // SAE 1, SAT (deviations from the mean 2.5) = 1.5 + 0.5 + 0.5 + 1.5 = 4.
    EXPECT_NEAR(*r_absolute(y, yhat), 0.75, 1e-15);
    EXPECT_NEAR(*adjusted_r_squared(y, yhat, 1), 1.0 - 0.1 * 3.0 / 2.0, 1e-15);
    EXPECT_NEAR(*adjusted_r_absolute(y, yhat, 1), 1.0 - 0.25 * 3.0 / 2.0, 1e-15);
    EXPECT_THROW(adjusted_r_squared(y, yhat, 3), ContractError);
    EXPECT_NEAR(mean_squared_error(y, yhat), 0.125, 1e-15);
}

TEST(Regression, RAbsoluteFallsWithNoise) {
    Rng rng(1);
    const auto y = normal_draws(rng, 400, 0, 1);
    const auto noise = normal_draws(rng, 400, 0, 1);
    double prev = 2.0;
    for (double level : {0.0, 0.1, 0.3, 1.0, 3.0}) {
        std::vector<double> yhat(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) yhat[i] = y[i] + level * noise[i];
        const double r = *r_absolute(y, yhat);
        EXPECT_LT(r, prev);
        prev = r;
    }
}

TEST(Auroc, TrivialCases) {
    const std::vector<double> labels{0, 0, 1, 1};
    EXPECT_EQ(*auroc(labels, std::vector<double>{0.1, 0.2, 0.8, 0.9}), 1.0);
    EXPECT_EQ(*auroc(labels, std::vector<double>{0.9, 0.8, 0.2, 0.1}), 0.0);
    EXPECT_EQ(*auroc(labels, std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0.5);
    EXPECT_FALSE(auroc(std::vector<double>{1, 1}, std::vector<double>{0.1, 0.2}).has_value());
}

TEST(Auroc, MatchesAllPairsOracle) {
    Rng rng(2);
    std::uniform_int_distribution<int> size(2, 12), level(0, 4);
    std::bernoulli_distribution coin(0.5);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = size(rng);
        std::vector<double> labels, scores;
        for (int i = 0; i < n; ++i) {
            labels.push_back(coin(rng) ? 1.0 : 0.0);
            scores.push_back(level(rng) * 0.25);
        }
        const auto got = auroc(labels, scores);
        const bool both = std::count(labels.begin(), labels.end(), 1.0) % n != 0;
        ASSERT_EQ(got.has_value(), both);
        if (!both) continue;
        EXPECT_EQ(*got, oracle::all_pairs_auroc(labels, scores));
        ++checked;
    }
    EXPECT_GT(checked, 300);
}

TEST(Auroc, InvariantUnderMonotoneTransform) {
    Rng rng(3);
    const auto scores = normal_draws(rng, 200, 0, 1);
    std::vector<double> labels, squashed;
    for (double s : scores) {
        labels.push_back(s + normal_draws(rng, 1, 0, 1)[0] > 0 ? 1.0 : 0.0);
        squashed.push_back(sigmoid(3.0 * s));
    }
    EXPECT_NEAR(*auroc(labels, scores), *auroc(labels, squashed), 1e-15);
    std::vector<double> flipped;
    for (double l : labels) flipped.push_back(1.0 - l);
    EXPECT_NEAR(*auroc(flipped, scores), 1.0 - *auroc(labels, scores), 1e-12);
}

TEST(Auprc, MatchesAveragePrecisionOracle) {
    Rng rng(4);
    std::uniform_int_distribution<int> size(1, 15), level(0, 5);
    std::bernoulli_distribution coin(0.4);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = size(rng);
        std::vector<double> labels, scores;
        for (int i = 0; i < n; ++i) {
            labels.push_back(coin(rng) ? 1.0 : 0.0);
            scores.push_back(level(rng));
        }
        const auto got = auprc(labels, scores);
        if (std::count(labels.begin(), labels.end(), 1.0) == 0) {
            EXPECT_FALSE(got.has_value());
            continue;
        }
        EXPECT_NEAR(*got, oracle::average_precision(labels, scores), 1e-12);
    }
}

TEST(Auprc, TrivialCases) {
    EXPECT_EQ(*auprc(std::vector<double>{0, 1, 1}, std::vector<double>{0.1, 0.8, 0.9}), 1.0);
    // One positive ranked last among four: precision 1/4.
    EXPECT_NEAR(*auprc(std::vector<double>{1, 0, 0, 0}, std::vector<double>{0.1, 0.2, 0.3, 0.4}), 0.25, 1e-15);
}

TEST(LogLoss, MatchesDirectFormulaAndIsStable) {
    const std::vector<double> y{1, 0, 1}, z{2.0, -1.0, -0.5};
    double want = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = oracle::sigmoid(z[i]);
        want -= y[i] * std::log(p) + (1 - y[i]) * std::log(1 - p);
    }
    EXPECT_NEAR(log_loss_from_logits(y, z), want / 3.0, 1e-14);
    EXPECT_NEAR(log_loss_from_logits(std::vector<double>{1}, std::vector<double>{-800.0}), 800.0, 1e-9);
}

TEST(Fairness, DisparateImpactHandCases) {
    EXPECT_NEAR(*disparate_impact_from_rates(0.2, 0.4), 0.5, 1e-15);
    EXPECT_NEAR(*disparate_impact_from_rates(0.4, 0.2), 0.5, 1e-15);
    EXPECT_EQ(*disparate_impact_from_rates(0.3, 0.3), 1.0);
    EXPECT_EQ(*disparate_impact_from_rates(0.0, 0.3), 0.0);
    EXPECT_FALSE(disparate_impact_from_rates(0.0, 0.0).has_value());
    EXPECT_FALSE(disparate_impact_from_rates(std::nullopt, 0.3).has_value());
}

TEST(Fairness, FavorableRatesFromPredictions) {
    const std::vector<double> p{0.1, 0.9, 0.2, 0.8, 0.7, 0.6};
    const std::vector<std::string> g{"a", "a", "a", "b", "b", "b"};
    // Favourable = predicted class 0: a has 2/3, b has 0/3.
    EXPECT_NEAR(*favorable_rate(p, g, "a"), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(*favorable_rate(p, g, "b"), 0.0);
    EXPECT_EQ(*favorable_rate(p, g, "b", 0.5, 1), 1.0);
    EXPECT_FALSE(favorable_rate(p, g, "c").has_value());
    EXPECT_EQ(*disparate_impact(p, g, "a", "b"), 0.0);
    EXPECT_NEAR(*disparate_impact(p, g, "a", "b", 0.65), 0.5, 1e-15);
}

TEST(Summary, PopulationStd) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = summarize(v);
    EXPECT_EQ(s.mean, 2.5);
    EXPECT_NEAR(*s.std, std::sqrt(1.25), 1e-15);
    EXPECT_FALSE(summarize(std::vector<double>{3}).std.has_value());
    EXPECT_EQ(summarize(std::vector<double>{}).count, 0u);
}
