#include <gtest/gtest.h>

#include "honam/feature_nets.hpp"
#include "honam/grad_check.hpp"

using namespace honam;

namespace {

FeatureNetConfig small_config(UnitKind unit = UnitKind::linear) {
    FeatureNetConfig c;
    c.hidden = {5, 4};
    c.k = 3;
    c.unit = unit;
    return c;
}

}  // namespace

TEST(FeatureNet, ZeroWeightsGiveZeroOutput) {
    Rng rng(1);
    auto net = FeatureNet::init(small_config(), rng);
    for (auto& l : net.layers()) {
        for (auto& v : l.weight.mutable_values()) v = 0.0;
        for (auto& v : l.bias.mutable_values()) v = 0.0;
    }
    const auto r = net.forward(Tensor::from_values(4, 1, {-1, 0, 2, 5}));
    for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(FeatureNet, LinearChainIsProportional) {
    std::vector<UnitLayer> layers;
    layers.push_back(UnitLayer::from_values(UnitKind::linear, 1, 2, {2, 0}, {0, 0}, Activation::identity()));
    layers.push_back(UnitLayer::from_values(UnitKind::linear, 2, 2, {1, 0, 0, 1}, {0, 0}, Activation::identity()));
    const FeatureNet net(std::move(layers));
    const auto r = net.forward(Tensor::from_values(3, 1, {1, -2, 0.5}));
    EXPECT_EQ(r(0, 0), 2.0);
    EXPECT_EQ(r(1, 0), -4.0);
    EXPECT_EQ(r(2, 0), 1.0);
    EXPECT_EQ(r(1, 1), 0.0);
}

TEST(FeatureNet, UnitPlacement) {
    Rng rng(2);
    auto cfg = small_config(UnitKind::expdive);
    const auto first_only = FeatureNet::init(cfg, rng);
    EXPECT_EQ(first_only.layers()[0].kind, UnitKind::expdive);
    EXPECT_EQ(first_only.layers()[1].kind, UnitKind::linear);
    EXPECT_EQ(first_only.layers()[2].kind, UnitKind::linear);
    EXPECT_EQ(first_only.layers()[2].act.kind, ActivationKind::identity);
    cfg.unit_in_all_layers = true;
    cfg.activate_output = true;
    const auto everywhere = FeatureNet::init(cfg, rng);
    EXPECT_EQ(everywhere.layers()[1].kind, UnitKind::expdive);
    EXPECT_EQ(everywhere.layers()[2].kind, UnitKind::linear);
    EXPECT_EQ(everywhere.layers()[2].act.kind, ActivationKind::leaky_relu);
}

TEST(FeatureNet, GradCheckThreeLayers) {
    for (auto unit : {UnitKind::linear, UnitKind::exu, UnitKind::expdive}) {
        Rng rng(8);
        auto cfg = small_config(unit);
        cfg.unit_act = Activation::leaky_relu(0.05);
        const auto net = FeatureNet::init(cfg, rng);
        const auto x = Tensor::from_values(7, 1, uniform_draws(rng, 7, -2, 2));
        auto loss = [&] { return sum(pow_int(net.forward(x), 2)); };
        EXPECT_LT(grad_check(loss, net.parameters()), 1e-4) << to_string(unit);
    }
}

TEST(FeatureNet, MismatchedLayersRejected) {
    std::vector<UnitLayer> layers;
    layers.push_back(UnitLayer::from_values(UnitKind::linear, 1, 2, {1, 1}, {0, 0}, Activation::identity()));
    layers.push_back(UnitLayer::from_values(UnitKind::linear, 3, 1, {1, 1, 1}, {0}, Activation::identity()));
    EXPECT_THROW(FeatureNet(std::move(layers)), DimensionError);
}

TEST(FeatureNetBank, SingletonMatchesNet) {
    Rng rng(3);
    const auto bank = FeatureNetBank::init(1, small_config(), rng);
    const auto x = Tensor::from_values(4, 1, {0.1, 0.2, -0.3, 1.0});
    const auto all = bank.bank_forward(x);
    ASSERT_EQ(all.size(), 1u);
    const auto one = bank.feature_net_forward(x, 0);
    EXPECT_TRUE(std::equal(all[0].values().begin(), all[0].values().end(), one.values().begin()));
}

TEST(FeatureNetBank, ShapesAndIndependence) {
    Rng rng(4);
    const auto bank = FeatureNetBank::init(4, small_config(UnitKind::exu), rng);
    auto xv = uniform_draws(rng, 20, -1, 1);
    const auto base = bank.bank_forward(Tensor::from_values(5, 4, xv));
    for (const auto& r : base) {
        EXPECT_EQ(r.rows(), 5u);
        EXPECT_EQ(r.cols(), 3u);
    }
    for (std::size_t row = 0; row < 5; ++row) xv[row * 4 + 1] += 0.37;
    const auto moved = bank.bank_forward(Tensor::from_values(5, 4, xv));
    for (std::size_t i = 0; i < 4; ++i) {
        const bool same = std::equal(base[i].values().begin(), base[i].values().end(), moved[i].values().begin());
        EXPECT_EQ(same, i != 1) << "feature " << i;
    }
}

TEST(FeatureNetBank, NetsDoNotShareParameters) {
    Rng rng(5);
    const auto bank = FeatureNetBank::init(3, small_config(), rng);
    EXPECT_NE(bank.nets()[0].layers()[0].weight.id(), bank.nets()[1].layers()[0].weight.id());
    EXPECT_FALSE(std::equal(bank.nets()[0].layers()[0].weight.values().begin(),
                            bank.nets()[0].layers()[0].weight.values().end(),
                            bank.nets()[1].layers()[0].weight.values().begin()));
}

TEST(FeatureNetBank, Errors) {
    Rng rng(6);
    const auto bank = FeatureNetBank::init(2, small_config(), rng);
    EXPECT_THROW(bank.feature_net_forward(Tensor::zeros(2, 1), 2), ConfigError);
    EXPECT_THROW(bank.bank_forward(Tensor::zeros(2, 3)), ContractError);
    auto bad = small_config();
    bad.k = 0;
    EXPECT_THROW(FeatureNetBank::init(2, bad, rng), ConfigError);
}
