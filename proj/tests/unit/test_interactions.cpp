#include <gtest/gtest.h>

#include <random>

#include "honam/grad_check.hpp"
#include "honam/interactions.hpp"
#include "oracles.hpp"

using namespace honam;

namespace {

Representations random_reprs(Rng& rng, std::size_t m, std::size_t k, double lo = -2.0, double hi = 2.0) {
    Representations r(m);
    for (auto& v : r) v = uniform_draws(rng, k, lo, hi);
    return r;
}

const Representations kOneTwoThree{{1.0}, {2.0}, {3.0}};

}  // namespace

TEST(Enumeration, HandCases) {
    EXPECT_EQ(enumerate_interactions(kOneTwoThree, 1)[0], 6.0);
    EXPECT_EQ(enumerate_interactions(kOneTwoThree, 2)[0], 11.0);
    EXPECT_EQ(enumerate_interactions(kOneTwoThree, 3)[0], 6.0);
    EXPECT_EQ(enumerate_interactions(kOneTwoThree, 4)[0], 0.0);
}

TEST(Enumeration, MatchesBitmaskOracle) {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = random_reprs(rng, 1 + trial % 7, 1 + trial % 4);
        for (std::size_t t = 1; t <= 5; ++t) {
            const auto got = enumerate_interactions(r, t);
            const auto want = oracle::subset_product_sum(r, t);
            for (std::size_t d = 0; d < got.size(); ++d) EXPECT_NEAR(got[d], want[d], 1e-12);
        }
    }
}

TEST(Enumeration, Errors) {
    EXPECT_THROW(enumerate_interactions(kOneTwoThree, 0), ConfigError);
    EXPECT_THROW(enumerate_interactions({}, 1), DimensionError);
    EXPECT_THROW(enumerate_interactions({{1.0, 2.0}, {1.0}}, 1), DimensionError);
}

TEST(PowerSums, HandCases) {
    const auto p = power_sums(kOneTwoThree, 3);
    EXPECT_EQ(p[0][0], 6.0);
    EXPECT_EQ(p[1][0], 14.0);
    EXPECT_EQ(p[2][0], 36.0);
    const auto z = power_sums({{0.0, 0.0}, {0.0, 0.0}}, 3);
    for (const auto& v : z) {
        for (double x : v) EXPECT_EQ(x, 0.0);
    }
    const auto single = power_sums({{2.0, -3.0}}, 3);
    EXPECT_EQ(single[2][0], 8.0);
    EXPECT_EQ(single[2][1], -27.0);
}

TEST(Recursion, HandCases) {
    const auto s = interaction_recursion(kOneTwoThree, 3);
    EXPECT_EQ(s.fi[0][0], 6.0);
    EXPECT_EQ(s.fi[1][0], 11.0);
    EXPECT_EQ(s.fi[2][0], 6.0);
}

TEST(Recursion, EqualsEnumerationOnRandomInstances) {
    Rng rng(2);
    std::uniform_int_distribution<std::size_t> mdist(1, 8), kdist(1, 4), tdist(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = mdist(rng), k = kdist(rng), t = tdist(rng);
        const auto r = random_reprs(rng, m, k);
        const auto s = interaction_recursion(r, t);
        ASSERT_EQ(s.fi.size(), t);
        for (std::size_t j = 1; j <= t; ++j) {
            const auto want = oracle::subset_product_sum(r, j);
            for (std::size_t d = 0; d < k; ++d) {
                if (j > m) {
                    EXPECT_EQ(s.fi[j - 1][d], 0.0);
                } else {
                    EXPECT_NEAR(s.fi[j - 1][d], want[d], 1e-10);
                }
            }
        }
    }
}

TEST(Recursion, VanishesAboveFeatureCount) {
    Rng rng(3);
    for (std::size_t m = 1; m <= 4; ++m) {
        const auto r = random_reprs(rng, m, 3);
        const auto s = interaction_recursion(r, m + 3);
        for (std::size_t j = m + 1; j <= m + 3; ++j) {
            for (double v : s.fi[j - 1]) EXPECT_EQ(v, 0.0) << "m=" << m << " j=" << j;
        }
    }
}

TEST(Recursion, MultilinearInEachRepresentation) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto r = random_reprs(rng, 5, 2);
        const double c = uniform_draws(rng, 1, -3, 3)[0];
        for (std::size_t j = 1; j <= 4; ++j) {
            // fi_j(c r_1) = c fi_j(r) + (1 - c) fi_j(r with r_1 = 0)
            auto scaled = r, zeroed = r;
            for (auto& v : scaled[0]) v *= c;
            for (auto& v : zeroed[0]) v = 0.0;
            const auto a = interaction_recursion(scaled, j).fi[j - 1];
            const auto b = interaction_recursion(r, j).fi[j - 1];
            const auto z = interaction_recursion(zeroed, j).fi[j - 1];
            for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(a[d], c * b[d] + (1 - c) * z[d], 1e-9);
        }
    }
}

TEST(Recursion, DifferentiableVersionAgrees) {
    Rng rng(5);
    const std::size_t n = 3, m = 4, k = 2, t = 4;
    std::vector<Tensor> reprs;
    std::vector<Representations> rows(n, Representations(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto v = uniform_draws(rng, n * k, -1, 1);
        reprs.push_back(Tensor::from_values(n, k, v));
        for (std::size_t r = 0; r < n; ++r) rows[r][i] = {v.begin() + r * k, v.begin() + (r + 1) * k};
    }
    const auto fi = interaction_orders(reprs, t);
    for (std::size_t r = 0; r < n; ++r) {
        const auto s = interaction_recursion(rows[r], t);
        EXPECT_EQ(fi.size(), t);
        for (std::size_t j = 0; j < t; ++j) {
            for (std::size_t d = 0; d < k; ++d) EXPECT_NEAR(fi[j](r, d), s.fi[j][d], 1e-13);
        }
    }
}

TEST(Recursion, GradCheck) {
    Rng rng(6);
    std::vector<Tensor> reprs;
    for (int i = 0; i < 4; ++i) reprs.push_back(Tensor::parameter(3, 2, uniform_draws(rng, 6, -1, 1)));
    auto loss = [&] {
        const auto fi = interaction_orders(reprs, 4);
        return add(add(sum(fi[1]), sum(fi[2])), sum(fi[3]));
    };
    EXPECT_LT(grad_check(loss, reprs), 1e-4);
}

TEST(CrossNet, FirstOrderIsLinear) {
    Rng rng(7);
    const auto stack = CrossNetStack::init(3, 2, 1, rng);
    const auto x = Tensor::from_values(2, 3, uniform_draws(rng, 6, -1, 1));
    const auto g = crossnet_forward(x, stack);
    const auto want = matmul(x, stack.weights[0]);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.values()[i], want.values()[i]);
}

TEST(CrossNet, IncludesSelfPowers) {
    CrossNetStack s;
    s.weights.push_back(Tensor::parameter(2, 2, {1, 0, 0, 1}));
    s.weights.push_back(Tensor::parameter(2, 2, {1, 0, 0, 1}));
    const auto g = crossnet_forward(Tensor::from_rows({{1.0, 2.0}}), s);
    // g_2 = g_1 * g_1 = [x1^2, x2^2]: squares, which enumeration never forms.
    EXPECT_EQ(g(0, 0), 1.0);
    EXPECT_EQ(g(0, 1), 4.0);
    const auto e = enumerate_interactions({{1.0}, {2.0}}, 2);
    EXPECT_EQ(e[0], 2.0);
}

TEST(CrossNet, GradCheckThreeLayers) {
    Rng rng(8);
    const auto stack = CrossNetStack::init(4, 3, 3, rng);
    const auto x = Tensor::from_values(5, 4, uniform_draws(rng, 20, -1, 1));
    EXPECT_LT(grad_check([&] { return sum(crossnet_forward(x, stack)); }, stack.parameters()), 1e-4);
}

TEST(CrossNet, ShapeErrors) {
    CrossNetStack s;
    s.weights.push_back(Tensor::parameter(2, 3, std::vector<double>(6, 1.0)));
    s.weights.push_back(Tensor::parameter(2, 2, std::vector<double>(4, 1.0)));
    EXPECT_THROW(crossnet_forward(Tensor::zeros(1, 2), s), DimensionError);
    EXPECT_THROW(crossnet_forward(Tensor::zeros(1, 2), CrossNetStack{}), ConfigError);
}

TEST(KernelCost, Formulas) {
    EXPECT_EQ(binomial(20, 5), 15504u);
    EXPECT_EQ(count_kernel_ops(KernelKind::enumeration, 20, 1, 5).multiplies, 62016u);
    const auto rec = count_kernel_ops(KernelKind::recursion, 20, 1, 5).multiplies;
    EXPECT_LE(rec, 5u * (5 + 20) * 2);
    EXPECT_EQ(count_kernel_ops(KernelKind::enumeration, 30, 4, 1).multiplies, 0u);
    EXPECT_EQ(count_kernel_ops(KernelKind::recursion, 30, 4, 1).multiplies, 0u);
    EXPECT_EQ(count_kernel_ops(KernelKind::enumeration, 30, 4, 1).additions, 120u);
    EXPECT_EQ(count_kernel_ops(KernelKind::recursion, 30, 4, 1).additions, 120u);
    EXPECT_THROW(count_kernel_ops(KernelKind::recursion, 0, 1, 1), ConfigError);
    EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(KernelCost, MatchesInstrumentedCounts) {
    Rng rng(9);
    for (std::size_t m : {3u, 7u, 12u}) {
        for (std::size_t k : {1u, 4u}) {
            for (std::size_t t : {1u, 2u, 4u}) {
                const auto r = random_reprs(rng, m, k);
                std::uint64_t e = 0, c = 0;
                enumerate_interactions(r, t, &e);
                interaction_recursion(r, t, &c);
                EXPECT_EQ(e, count_kernel_ops(KernelKind::enumeration, m, k, t).multiplies);
                EXPECT_EQ(c, count_kernel_ops(KernelKind::recursion, m, k, t).multiplies);
            }
        }
    }
}

TEST(KernelKind, StringRoundTrip) {
    for (auto k : {KernelKind::enumeration, KernelKind::recursion, KernelKind::crossnet}) {
        EXPECT_EQ(kernel_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(kernel_kind_from_string("fft"), ConfigError);
}
