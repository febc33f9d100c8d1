#pragma once

#include <string>
#include <vector>

#include "honam/errors.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"
#include "honam/units.hpp"

namespace honam {

/// Architecture shared by every per-feature network in a bank.
struct FeatureNetConfig {
    std::vector<std::size_t> hidden{32, 64, 32};
    std::size_t k = 32;  // representation width
    UnitKind unit = UnitKind::linear;
    Activation hidden_act = Activation::leaky_relu(0.01);
    /// Activation of exu/expdive layers.
    Activation unit_act = Activation::relu_n(1.0);
    /// false pins the exu/expdive input shift at 0 (the bias-free unit).
    bool trainable_shift = true;
    /// Use `unit` for every hidden layer instead of the first only.
    bool unit_in_all_layers = false;
    /// Apply hidden_act to the k-wide output layer as well.
    bool activate_output = false;

    void validate() const {
        if (k == 0) throw ConfigError("feature net: representation width k must be positive");
        for (auto h : hidden) {
            if (h == 0) throw ConfigError("feature net: hidden sizes must be positive");
        }
        hidden_act.validate();
        unit_act.validate();
    }
};

/// One scalar-in, k-vector-out network.
class FeatureNet {
public:
    FeatureNet() = default;
    explicit FeatureNet(std::vector<UnitLayer> layers) : layers_(std::move(layers)) {
        if (layers_.empty()) throw ConfigError("feature net: needs at least one layer");
        if (layers_.front().in() != 1) throw DimensionError("feature net: first layer must take 1 input");
        for (std::size_t i = 1; i < layers_.size(); ++i) {
            if (layers_[i].in() != layers_[i - 1].out()) {
                throw DimensionError("feature net: layer " + std::to_string(i) + " expects " +
                                     std::to_string(layers_[i].in()) + " inputs, previous emits " +
                                     std::to_string(layers_[i - 1].out()));
            }
        }
    }

    static FeatureNet init(const FeatureNetConfig& cfg, Rng& rng) {
        cfg.validate();
        std::vector<std::size_t> sizes{1};
        sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
        sizes.push_back(cfg.k);
        std::vector<UnitLayer> layers;
        const std::size_t n_layers = sizes.size() - 1;
        for (std::size_t i = 0; i < n_layers; ++i) {
            const bool is_output = i + 1 == n_layers;
            const bool special = !is_output && (i == 0 || cfg.unit_in_all_layers);
            const UnitKind kind = special ? cfg.unit : UnitKind::linear;
            Activation act = cfg.hidden_act;
            if (kind != UnitKind::linear) act = cfg.unit_act;
            if (is_output && !cfg.activate_output) act = Activation::identity();
            layers.push_back(UnitLayer::init(kind, sizes[i], sizes[i + 1], act, rng, cfg.trainable_shift));
        }
        return FeatureNet(std::move(layers));
    }

    Tensor forward(const Tensor& x_col) const {
        if (x_col.cols() != 1) throw DimensionError("feature net: expects n x 1 input, got " + x_col.shape_str());
        Tensor h = x_col;
        for (const auto& l : layers_) h = unit_forward(h, l);
        return h;
    }

    std::size_t out_width() const { return layers_.back().out(); }
    const std::vector<UnitLayer>& layers() const { return layers_; }
    std::vector<UnitLayer>& layers() { return layers_; }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> ps;
        for (const auto& l : layers_) {
            for (auto& p : l.parameters()) ps.push_back(p);
        }
        return ps;
    }

private:
    std::vector<UnitLayer> layers_;
};

/// m independent feature networks; net i only ever sees column i.
class FeatureNetBank {
public:
    FeatureNetBank() = default;
    explicit FeatureNetBank(std::vector<FeatureNet> nets) : nets_(std::move(nets)) {
        if (nets_.empty()) throw ConfigError("feature bank: needs at least one feature");
        for (const auto& n : nets_) {
            if (n.out_width() != nets_.front().out_width()) {
                throw DimensionError("feature bank: nets disagree on representation width");
            }
        }
    }

    static FeatureNetBank init(std::size_t m, const FeatureNetConfig& cfg, Rng& rng) {
        std::vector<FeatureNet> nets;
        nets.reserve(m);
        for (std::size_t i = 0; i < m; ++i) nets.push_back(FeatureNet::init(cfg, rng));
        return FeatureNetBank(std::move(nets));
    }

    std::size_t m() const { return nets_.size(); }
    std::size_t k() const { return nets_.front().out_width(); }

    Tensor feature_net_forward(const Tensor& x_col, std::size_t i) const {
        if (i >= nets_.size()) {
            throw ConfigError("feature net index " + std::to_string(i) + " out of range (m=" +
                              std::to_string(nets_.size()) + ")");
        }
        return nets_[i].forward(x_col);
    }

    std::vector<Tensor> bank_forward(const Tensor& x) const {
        if (x.cols() != nets_.size()) {
            throw ContractError("feature bank: input has " + std::to_string(x.cols()) +
                                " columns, bank has " + std::to_string(nets_.size()) + " features");
        }
        std::vector<Tensor> reprs;
        reprs.reserve(nets_.size());
        for (std::size_t i = 0; i < nets_.size(); ++i) reprs.push_back(nets_[i].forward(column(x, i)));
        return reprs;
    }

    const std::vector<FeatureNet>& nets() const { return nets_; }
    std::vector<FeatureNet>& nets() { return nets_; }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> ps;
        for (const auto& n : nets_) {
            for (auto& p : n.parameters()) ps.push_back(p);
        }
        return ps;
    }

private:
    std::vector<FeatureNet> nets_;
};

}  // namespace honam
