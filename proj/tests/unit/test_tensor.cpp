#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "honam/grad_check.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"
#include "oracles.hpp"

using namespace honam;

namespace {

Tensor param(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    return Tensor::parameter(r, c, uniform_draws(rng, r * c, lo, hi));
}

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST(Matmul, IdentityCase) {
    const auto a = Tensor::from_rows({{1, 2}, {3, 4}});
    const auto i = Tensor::from_rows({{1, 0}, {0, 1}});
    EXPECT_EQ(vals(matmul(a, i)), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Matmul, DotProduct) {
    const auto c = matmul(Tensor::from_rows({{1, 2}}), Tensor::from_rows({{3}, {4}}));
    EXPECT_EQ(c.rows(), 1u);
    EXPECT_EQ(c.cols(), 1u);
    EXPECT_EQ(c.item(), 11.0);
}

TEST(Matmul, MatchesTripleLoop) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = uniform_draws(rng, 12, -10.0, 10.0);
        const auto b = uniform_draws(rng, 8, -10.0, 10.0);
        const auto got = matmul(Tensor::from_values(3, 4, a), Tensor::from_values(4, 2, b));
        const auto want = oracle::matmul(a, b, 3, 4, 2);
        for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.values()[i], want[i], 1e-12);
    }
}

TEST(Matmul, ShapeMismatchNamesShapes) {
    try {
        matmul(Tensor::zeros(2, 3), Tensor::zeros(2, 3));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2x3"), std::string::npos);
    }
}

TEST(Elementwise, HandCases) {
    EXPECT_EQ(vals(elementwise(Elementwise::mul, Tensor::from_rows({{2, 3}}), Tensor::from_rows({{4, 5}}))),
              (std::vector<double>{8, 15}));
    EXPECT_EQ(vals(pow_int(Tensor::from_rows({{-2, 3}}), 2)), (std::vector<double>{4, 9}));
    EXPECT_EQ(vals(exp(Tensor::from_rows({{0}}))), (std::vector<double>{1}));
    EXPECT_EQ(vals(elementwise(Elementwise::add, Tensor::from_rows({{1, 2}}), 3.0)), (std::vector<double>{4, 5}));
    EXPECT_EQ(vals(elementwise(Elementwise::scale, Tensor::from_rows({{1, 2}}), -2.0)),
              (std::vector<double>{-2, -4}));
    EXPECT_EQ(vals(neg(Tensor::from_rows({{1, -2}}))), (std::vector<double>{-1, 2}));
    EXPECT_EQ(vals(sub(Tensor::from_rows({{5, 1}}), Tensor::from_rows({{2, 3}}))), (std::vector<double>{3, -2}));
}

TEST(Elementwise, Errors) {
    EXPECT_THROW(add(Tensor::zeros(1, 2), Tensor::zeros(2, 1)), DimensionError);
    EXPECT_THROW(pow_int(Tensor::zeros(1, 2), -1), ConfigError);
}

TEST(Activation, HandCases) {
    EXPECT_EQ(relu(Tensor::scalar(-1.5)).item(), 0.0);
    EXPECT_EQ(relu_n(Tensor::scalar(2.7), 1.0).item(), 1.0);
    EXPECT_DOUBLE_EQ(leaky_relu(Tensor::scalar(-2.0), 0.01).item(), -0.02);
    EXPECT_EQ(activation(Tensor::scalar(-3.0), Activation::identity()).item(), -3.0);
}

TEST(Activation, InvalidParameters) {
    EXPECT_THROW(relu_n(Tensor::scalar(1.0), 0.0), ConfigError);
    EXPECT_THROW(leaky_relu(Tensor::scalar(1.0), 1.0), ConfigError);
    EXPECT_THROW(leaky_relu(Tensor::scalar(1.0), 0.0), ConfigError);
}

TEST(Activation, KinkSubgradients) {
    auto x = Tensor::parameter(1, 3, {0.0, 1.0, 0.0});
    backward(sum(relu(x)));
    EXPECT_EQ(x.grad()[0], 0.0);
    auto y = Tensor::parameter(1, 1, {1.0});
    backward(sum(relu_n(y, 1.0)));
    EXPECT_EQ(y.grad()[0], 0.0);
    auto z = Tensor::parameter(1, 1, {0.0});
    backward(sum(leaky_relu(z, 0.1)));
    EXPECT_DOUBLE_EQ(z.grad()[0], 0.1);
}

TEST(Backward, LinearGradient) {
    auto w = Tensor::parameter(1, 3, {0.5, -1.0, 2.0});
    const auto x = Tensor::from_rows({{1.0}, {2.0}, {3.0}});
    backward(sum(matmul(w, x)));
    EXPECT_EQ(vals(Tensor::from_values(1, 3, {w.grad().begin(), w.grad().end()})),
              (std::vector<double>{1, 2, 3}));
}

TEST(Backward, ExpAtZero) {
    auto w = Tensor::parameter(2, 2, {0, 0, 0, 0});
    backward(sum(exp(w)));
    for (double g : w.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, SecondReplayIsStateError) {
    auto w = Tensor::parameter(1, 1, {1.0});
    const auto loss = sum(mul(w, w));
    backward(loss);
    EXPECT_THROW(backward(loss), StateError);
}

TEST(Backward, NonScalarLossRejected) {
    auto w = Tensor::parameter(1, 2, {1.0, 2.0});
    EXPECT_THROW(backward(mul(w, w)), DimensionError);
}

TEST(Backward, TapeVisitsEachNodeOnce) {
    auto w = Tensor::parameter(1, 1, {3.0});
    // Diamond: w feeds two branches that rejoin.
    const auto a = mul(w, w);
    const auto b = scale(w, 2.0);
    const auto loss = sum(add(a, b));
    auto tape = GraphTape::record(loss);
    EXPECT_EQ(tape.size(), 5u);  // w, a, b, add, sum
    tape.replay();
    EXPECT_DOUBLE_EQ(w.grad()[0], 2 * 3.0 + 2.0);
}

TEST(Backward, AccumulatesAcrossFanOut) {
    auto w = Tensor::parameter(1, 1, {1.5});
    backward(sum(add(w, add(w, w))));
    EXPECT_DOUBLE_EQ(w.grad()[0], 3.0);
}

TEST(Backward, LinearityOfGradients) {
    Rng rng(11);
    auto a = param(3, 3, rng);
    auto b = param(3, 1, rng);
    auto loss1 = [&] { return sum(exp(matmul(a, b))); };
    auto loss2 = [&] { return mean(mul(a, a)); };
    backward(loss1());
    auto g1 = vals(Tensor::from_values(3, 3, {a.grad().begin(), a.grad().end()}));
    a.zero_grad();
    b.zero_grad();
    backward(loss2());
    auto g2 = vals(Tensor::from_values(3, 3, {a.grad().begin(), a.grad().end()}));
    a.zero_grad();
    b.zero_grad();
    backward(add(loss1(), loss2()));
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(a.grad()[i], g1[i] + g2[i], 1e-12);
}

TEST(GradCheck, SingleLinearLayer) {
    Rng rng(3);
    auto w = param(4, 2, rng);
    auto b = param(1, 2, rng);
    const auto x = Tensor::from_values(5, 4, uniform_draws(rng, 20, -1, 1));
    const double err = grad_check([&] { return sum(add(matmul(x, w), matmul(ones_column(5), b))); }, {w, b});
    EXPECT_LT(err, 1e-8);
}

TEST(GradCheck, EpsilonRange) {
    auto w = Tensor::parameter(1, 1, {1.0});
    EXPECT_THROW(grad_check([&] { return sum(w); }, {w}, 1e-2), ConfigError);
    EXPECT_THROW(grad_check([&] { return sum(w); }, {w}, 1e-9), ConfigError);
}

TEST(GradCheck, NonFiniteLoss) {
    auto w = Tensor::parameter(1, 1, {1000.0});
    EXPECT_THROW(grad_check([&] { return sum(exp(w)); }, {w}), NumericError);
}

TEST(GradCheck, TwoLayerNetwork) {
    Rng rng(5);
    auto w1 = param(3, 6, rng);
    auto b1 = param(1, 6, rng);
    auto w2 = param(6, 1, rng);
    const auto x = Tensor::from_values(8, 3, uniform_draws(rng, 24, -1, 1));
    const auto y = Tensor::from_values(8, 1, uniform_draws(rng, 8, -1, 1));
    auto loss = [&] {
        const auto h = leaky_relu(add(matmul(x, w1), matmul(ones_column(8), b1)), 0.1);
        return mse_loss(matmul(h, w2), y);
    };
    EXPECT_LT(grad_check(loss, {w1, b1, w2}), 1e-4);
}

// Every primitive against finite differences on 100 random trials.
TEST(GradCheck, EveryPrimitiveRandomized) {
    Rng rng(2024);
    std::uniform_int_distribution<int> pick(0, 13);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = param(3, 4, rng);
        auto b = param(3, 4, rng);
        auto c = param(4, 2, rng);
        // Keep inputs off the activation kinks.
        for (auto& v : a.mutable_values()) {
            if (std::abs(v) < 0.05) v += 0.1;
            if (std::abs(v - 1.0) < 0.05) v -= 0.1;
        }
        const auto labels = Tensor::from_values(3, 1, {0.0, 1.0, 1.0});
        const int op = pick(rng);
        auto loss = [&]() -> Tensor {
            switch (op) {
                case 0: return sum(add(a, b));
                case 1: return sum(sub(a, b));
                case 2: return sum(mul(a, b));
                case 3: return sum(matmul(a, c));
                case 4: return sum(pow_int(a, 3));
                case 5: return sum(exp(a));
                case 6: return sum(scale(a, -1.7));
                case 7: return mean(add_scalar(a, 2.0));
                case 8: return sum(relu(a));
                case 9: return sum(relu_n(a, 1.0));
                case 10: return sum(leaky_relu(a, 0.2));
                case 11: return sum(mul(concat_cols({a, b}), concat_cols({b, a})));
                case 12: return mse_loss(column(a, 1), column(b, 2));
                default: return logistic_loss(slice_cols(matmul(a, c), 0, 1), labels);
            }
        };
        EXPECT_LT(grad_check(loss, {a, b, c}), 1e-4) << "op " << op;
    }
}

TEST(Losses, LogisticLossStable) {
    const auto z = Tensor::from_values(2, 1, {800.0, -800.0});
    const auto y = Tensor::from_values(2, 1, {1.0, 0.0});
    EXPECT_NEAR(logistic_loss(z, y).item(), 0.0, 1e-12);
    const auto z0 = Tensor::from_values(1, 1, {0.0});
    EXPECT_NEAR(logistic_loss(z0, Tensor::from_values(1, 1, {1.0})).item(), std::log(2.0), 1e-15);
}

TEST(Slicing, RowsAndColumns) {
    const auto a = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
    EXPECT_EQ(vals(slice_cols(a, 1, 3)), (std::vector<double>{2, 3, 5, 6}));
    EXPECT_EQ(vals(slice_rows(a, 1, 2)), (std::vector<double>{4, 5, 6}));
    EXPECT_EQ(vals(column(a, 2)), (std::vector<double>{3, 6}));
    EXPECT_EQ(vals(concat_cols({column(a, 0), column(a, 2)})), (std::vector<double>{1, 3, 4, 6}));
    EXPECT_THROW(column(a, 3), DimensionError);
}
