#include <gtest/gtest.h>

#include <cmath>

#include "honam/grad_check.hpp"
#include "honam/units.hpp"

using namespace honam;

namespace {

double scalar_unit(UnitKind kind, double x, double w, double b, Activation act) {
    const auto layer = UnitLayer::from_values(kind, 1, 1, {w}, {b}, act);
    return unit_forward(Tensor::scalar(x), layer).item();
}

}  // namespace

TEST(LinearUnit, HandCases) {
    const auto sum_layer = UnitLayer::from_values(UnitKind::linear, 2, 1, {1, 1}, {0}, Activation::identity());
    EXPECT_EQ(linear_forward(Tensor::from_rows({{1, 1}}), sum_layer).item(), 2.0);
    EXPECT_EQ(scalar_unit(UnitKind::linear, -1.0, 1.0, 0.0, Activation::relu()), 0.0);
}

TEST(LinearUnit, MatchesLoopOracle) {
    Rng rng(1);
    const std::size_t n = 4, in = 3, out = 5;
    const auto w = uniform_draws(rng, in * out, -1, 1);
    const auto b = uniform_draws(rng, out, -1, 1);
    const auto x = uniform_draws(rng, n * in, -2, 2);
    const auto layer = UnitLayer::from_values(UnitKind::linear, in, out, w, b, Activation::leaky_relu(0.1));
    const auto got = linear_forward(Tensor::from_values(n, in, x), layer);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < out; ++j) {
            double s = b[j];
            for (std::size_t l = 0; l < in; ++l) s += x[i * in + l] * w[l * out + j];
            const double want = s > 0 ? s : 0.1 * s;
            EXPECT_NEAR(got(i, j), want, 1e-12);
        }
    }
}

TEST(ExuUnit, HandCases) {
    EXPECT_EQ(scalar_unit(UnitKind::exu, 0.0, 0.0, 0.0, Activation::identity()), 0.0);
    EXPECT_NEAR(scalar_unit(UnitKind::exu, 1.0, std::log(2.0), 0.0, Activation::identity()), 2.0, 1e-15);
    // Shift applies before the weight.
    EXPECT_NEAR(scalar_unit(UnitKind::exu, 3.0, 0.0, 1.0, Activation::identity()), 2.0, 1e-15);
}

TEST(ExuUnit, DeadOnNegativeInputsWithRelu) {
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const double x = -uniform_draws(rng, 1, 1e-3, 5.0)[0];
        auto layer = UnitLayer::from_values(UnitKind::exu, 1, 4, normal_draws(rng, 4, 0.5, 1.0), {0.0},
                                            Activation::relu());
        const auto y = exu_forward(Tensor::scalar(x), layer);
        for (double v : y.values()) EXPECT_EQ(v, 0.0);
        backward(sum(y));
        for (double g : layer.weight.grad()) EXPECT_EQ(g, 0.0);
    }
}

TEST(ExpDiveUnit, HandCases) {
    EXPECT_EQ(scalar_unit(UnitKind::expdive, 0.7, 0.0, 0.0, Activation::identity()), 0.0);
    const double want = (-1.0) * (std::exp(-1.0) - std::exp(1.0));
    EXPECT_NEAR(scalar_unit(UnitKind::expdive, -1.0, -1.0, 0.0, Activation::identity()), want, 1e-12);
    EXPECT_NEAR(want, 2.3504, 1e-4);
}

TEST(ExpDiveUnit, SlopeIsOddAndIncreasing) {
    Rng rng(4);
    for (double w : uniform_draws(rng, 200, -3, 3)) {
        EXPECT_DOUBLE_EQ(expdive_slope(w), -expdive_slope(-w));
        EXPECT_LT(expdive_slope(w), expdive_slope(w + 1e-3));
    }
}

TEST(ExpDiveUnit, PreActivationSign) {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const auto d = uniform_draws(rng, 3, -2, 2);
        const double x = d[0], w = d[1], b = d[2];
        const double pre = scalar_unit(UnitKind::expdive, x, w, b, Activation::identity());
        const double want = ((x - b) > 0 ? 1 : -1) * (w > 0 ? 1 : -1);
        EXPECT_EQ(pre > 0 ? 1 : -1, want);
    }
}

TEST(ExpDiveUnit, ReachesNegativeInputs) {
    auto layer = UnitLayer::from_values(UnitKind::expdive, 1, 1, {-0.5}, {0.0}, Activation::relu());
    const auto y = expdive_forward(Tensor::scalar(-0.8), layer);
    EXPECT_GT(y.item(), 0.0);
    backward(sum(y));
    EXPECT_NE(layer.weight.grad()[0], 0.0);
}

TEST(Units, KindAndShapeChecks) {
    const auto lin = UnitLayer::from_values(UnitKind::linear, 2, 1, {1, 1}, {0}, Activation::identity());
    EXPECT_THROW(exu_forward(Tensor::zeros(1, 2), lin), ConfigError);
    EXPECT_THROW(linear_forward(Tensor::zeros(1, 3), lin), DimensionError);
    EXPECT_EQ(unit_kind_from_string("expdive"), UnitKind::expdive);
    EXPECT_THROW(unit_kind_from_string("tanh"), ConfigError);
}

TEST(Units, InitIsSeededAndShaped) {
    Rng a(3), b(3);
    const auto la = UnitLayer::init(UnitKind::exu, 1, 8, Activation::relu_n(1.0), a);
    const auto lb = UnitLayer::init(UnitKind::exu, 1, 8, Activation::relu_n(1.0), b);
    EXPECT_EQ(la.bias.cols(), 1u);
    EXPECT_TRUE(std::equal(la.weight.values().begin(), la.weight.values().end(), lb.weight.values().begin()));
    Rng c(3);
    const auto fixed = UnitLayer::init(UnitKind::expdive, 1, 8, Activation::relu(), c, false);
    EXPECT_FALSE(fixed.shift_trainable());
    EXPECT_EQ(fixed.parameters().size(), 1u);
    Rng d(3);
    const auto lin = UnitLayer::init(UnitKind::linear, 4, 8, Activation::identity(), d);
    EXPECT_EQ(lin.bias.cols(), 8u);
}

TEST(Units, GradCheckEveryKind) {
    Rng rng(21);
    const auto x = Tensor::from_values(6, 3, uniform_draws(rng, 18, -1.5, 1.5));
    for (auto kind : {UnitKind::linear, UnitKind::exu, UnitKind::expdive}) {
        Rng r2(kind == UnitKind::linear ? 1 : kind == UnitKind::exu ? 2 : 3);
        auto layer = UnitLayer::init(kind, 3, 4, Activation::leaky_relu(0.1), r2);
        auto loss = [&] { return sum(pow_int(unit_forward(x, layer), 2)); };
        EXPECT_LT(grad_check(loss, layer.parameters()), 1e-4) << to_string(kind);
    }
}
