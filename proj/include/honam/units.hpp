#pragma once

// Hidden-unit families used by the per-feature networks.
//
//   linear   sigma(x W + b)
//   exu      sigma((x - b) exp(W))
//   expdive  sigma((x - b) (exp(W) - exp(-W)))
//
// exu/expdive shift the input by a per-input bias before weighting; linear
// adds a per-output bias after weighting.

#include <cmath>
#include <string>
#include <vector>

#include "honam/errors.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"

namespace honam {

enum class UnitKind { linear, exu, expdive };

inline const char* to_string(UnitKind k) {
    switch (k) {
        case UnitKind::linear: return "linear";
        case UnitKind::exu: return "exu";
        case UnitKind::expdive: return "expdive";
    }
    return "?";
}

inline UnitKind unit_kind_from_string(const std::string& s) {
    if (s == "linear") return UnitKind::linear;
    if (s == "exu") return UnitKind::exu;
    if (s == "expdive") return UnitKind::expdive;
    throw ConfigError("unknown unit kind '" + s + "' (expected linear, exu or expdive)");
}

/// Effective slope of an ExpDive weight; odd and strictly increasing in w.
inline double expdive_slope(double w) { return std::exp(w) - std::exp(-w); }

struct UnitLayer {
    UnitKind kind = UnitKind::linear;
    Tensor weight;  // in x out
    Tensor bias;    // linear: 1 x out; exu/expdive: 1 x in
    Activation act = Activation::identity();

    std::size_t in() const { return weight.rows(); }
    std::size_t out() const { return weight.cols(); }

    /// Seeded initialisation. linear: W ~ N(0, sqrt(2/in)), b = 0.
    /// exu/expdive: W ~ N(0.5, 0.5), b ~ N(0, 0.5). With
    /// `trainable_shift == false` the exu/expdive shift is a constant zero.
    static UnitLayer init(UnitKind kind, std::size_t in, std::size_t out, Activation act, Rng& rng,
                          bool trainable_shift = true) {
        act.validate();
        UnitLayer l;
        l.kind = kind;
        l.act = act;
        if (kind == UnitKind::linear) {
            l.weight = Tensor::parameter(
                in, out, normal_draws(rng, in * out, 0.0, std::sqrt(2.0 / static_cast<double>(in))));
            l.bias = Tensor::parameter(1, out, std::vector<double>(out, 0.0));
        } else {
            l.weight = Tensor::parameter(in, out, normal_draws(rng, in * out, 0.5, 0.5));
            if (trainable_shift) {
                l.bias = Tensor::parameter(1, in, normal_draws(rng, in, 0.0, 0.5));
            } else {
                l.bias = Tensor::zeros(1, in);
            }
        }
        return l;
    }

    /// Layer from explicit values; bias becomes a parameter.
    static UnitLayer from_values(UnitKind kind, std::size_t in, std::size_t out,
                                 std::vector<double> w, std::vector<double> b, Activation act) {
        act.validate();
        UnitLayer l;
        l.kind = kind;
        l.act = act;
        l.weight = Tensor::parameter(in, out, std::move(w));
        l.bias = Tensor::parameter(1, kind == UnitKind::linear ? out : in, std::move(b));
        return l;
    }

    bool shift_trainable() const { return bias.is_parameter(); }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> ps{weight};
        if (bias.is_parameter()) ps.push_back(bias);
        return ps;
    }
};

namespace detail {

inline void check_layer_input(const Tensor& x, const UnitLayer& layer, UnitKind expected,
                              const char* op) {
    if (layer.kind != expected) {
        throw ConfigError(std::string(op) + ": layer is " + to_string(layer.kind));
    }
    if (x.cols() != layer.in()) {
        throw DimensionError(std::string(op) + ": input " + x.shape_str() + " vs weight " +
                             layer.weight.shape_str());
    }
}

inline Tensor shifted_input(const Tensor& x, const UnitLayer& layer) {
    return sub(x, matmul(ones_column(x.rows()), layer.bias));
}

}  // namespace detail

inline Tensor linear_forward(const Tensor& x, const UnitLayer& layer) {
    detail::check_layer_input(x, layer, UnitKind::linear, "linear_forward");
    const Tensor pre = add(matmul(x, layer.weight), matmul(ones_column(x.rows()), layer.bias));
    return activation(pre, layer.act);
}

inline Tensor exu_forward(const Tensor& x, const UnitLayer& layer) {
    detail::check_layer_input(x, layer, UnitKind::exu, "exu_forward");
    const Tensor pre = matmul(detail::shifted_input(x, layer), exp(layer.weight));
    return activation(pre, layer.act);
}

inline Tensor expdive_forward(const Tensor& x, const UnitLayer& layer) {
    detail::check_layer_input(x, layer, UnitKind::expdive, "expdive_forward");
    const Tensor slope = sub(exp(layer.weight), exp(neg(layer.weight)));
    const Tensor pre = matmul(detail::shifted_input(x, layer), slope);
    return activation(pre, layer.act);
}

inline Tensor unit_forward(const Tensor& x, const UnitLayer& layer) {
    switch (layer.kind) {
        case UnitKind::linear: return linear_forward(x, layer);
        case UnitKind::exu: return exu_forward(x, layer);
        case UnitKind::expdive: return expdive_forward(x, layer);
    }
    throw ConfigError("unit_forward: unknown kind");
}

}  // namespace honam
