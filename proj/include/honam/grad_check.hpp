#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "honam/errors.hpp"
#include "honam/tensor.hpp"

namespace honam {

/// Largest relative disagreement between the analytic gradient of `loss_fn`
/// and central finite differences, over every entry of every tensor in
/// `params`. Relative error is |a - n| / max(1, |a|, |n|).
///
/// `loss_fn` must rebuild the graph from the current parameter values on
/// every call. Parameter gradients are zeroed first and left holding the
/// analytic gradient on return.
inline double grad_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params,
                         double eps = 1e-5) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) {
        throw ConfigError("grad_check: eps must lie in [1e-7, 1e-3]");
    }
    auto eval = [&] {
        const double v = loss_fn().item();
        if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss");
        return v;
    };

    for (auto& p : params) p.zero_grad();
    Tensor loss = loss_fn();
    if (!std::isfinite(loss.item())) throw NumericError("grad_check: non-finite loss");
    backward(loss);

    double worst = 0.0;
    for (auto& p : params) {
        const std::vector<double> analytic(p.grad().begin(), p.grad().end());
        auto vals = p.mutable_values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double orig = vals[i];
            vals[i] = orig + eps;
            const double up = eval();
            vals[i] = orig - eps;
            const double down = eval();
            vals[i] = orig;
            const double numeric = (up - down) / (2.0 * eps);
            const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
            worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace honam
