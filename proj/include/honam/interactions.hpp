#pragma once

// Order-t feature interactions over per-feature representation vectors
// r_1..r_m in R^k. The order-j interaction fi_j is the element-wise sum over
// all j-subsets of features of the element-wise product of their vectors,
// i.e. the j-th elementary symmetric polynomial taken per coordinate.
//
// Three ways to get there:
//   enumerate_interactions   walks every subset, O(C(m,t) t k)
//   interaction_recursion    Newton's identities over power sums, O(t (t+m) k)
//   crossnet_forward         g_t = (g_1 . g_{t-1}) W_t, which also mixes in
//                            self-powers such as x_i^2

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "honam/errors.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"

namespace honam {

/// m representation vectors, each of width k.
using Representations = std::vector<std::vector<double>>;

namespace detail {

inline std::size_t repr_width(const Representations& reprs) {
    if (reprs.empty()) throw DimensionError("interactions: need at least one representation");
    const std::size_t k = reprs.front().size();
    for (const auto& r : reprs) {
        if (r.size() != k) throw DimensionError("interactions: representations differ in width");
    }
    return k;
}

inline void require_order(std::size_t t) {
    if (t == 0) throw ConfigError("interactions: order must be at least 1");
}

}  // namespace detail

/// Sum over i_1 < ... < i_t of r_{i_1} * ... * r_{i_t} (element-wise).
/// If `multiplies` is given it is incremented by the number of scalar
/// multiplications performed.
inline std::vector<double> enumerate_interactions(const Representations& reprs, std::size_t t,
                                                  std::uint64_t* multiplies = nullptr) {
    detail::require_order(t);
    const std::size_t k = detail::repr_width(reprs);
    const std::size_t m = reprs.size();
    std::vector<double> acc(k, 0.0);
    if (t > m) return acc;

    std::vector<std::size_t> idx(t);
    for (std::size_t l = 0; l < t; ++l) idx[l] = l;
    std::vector<double> prod(k);
    std::uint64_t count = 0;
    while (true) {
        prod = reprs[idx[0]];
        for (std::size_t l = 1; l < t; ++l) {
            const auto& r = reprs[idx[l]];
            for (std::size_t d = 0; d < k; ++d) prod[d] *= r[d];
        }
        count += (t - 1) * k;
        for (std::size_t d = 0; d < k; ++d) acc[d] += prod[d];

        // Next combination in lexicographic order.
        std::size_t pos = t;
        while (pos > 0 && idx[pos - 1] == m - t + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t l = pos; l < t; ++l) idx[l] = idx[l - 1] + 1;
    }
    if (multiplies) *multiplies += count;
    return acc;
}

/// pfi_j[d] = sum_i r_i[d]^j for j = 1..t; element j-1 holds pfi_j.
inline std::vector<std::vector<double>> power_sums(const Representations& reprs, std::size_t t,
                                                   std::uint64_t* multiplies = nullptr) {
    detail::require_order(t);
    const std::size_t k = detail::repr_width(reprs);
    std::vector<std::vector<double>> pfi(t, std::vector<double>(k, 0.0));
    std::vector<double> pw(k);
    for (const auto& r : reprs) {
        pw = r;
        for (std::size_t d = 0; d < k; ++d) pfi[0][d] += pw[d];
        for (std::size_t j = 1; j < t; ++j) {
            for (std::size_t d = 0; d < k; ++d) {
                pw[d] *= r[d];
                pfi[j][d] += pw[d];
            }
        }
    }
    if (multiplies) *multiplies += static_cast<std::uint64_t>(t - 1) * reprs.size() * k;
    return pfi;
}

/// Interaction sums of orders 1..t with the power sums they were built from.
/// fi[j-1] and pfi[j-1] hold order j; order 0 is the implicit scalar 1.
struct InteractionStack {
    std::size_t t = 0;
    std::vector<std::vector<double>> fi;
    std::vector<std::vector<double>> pfi;
};

/// fi_j = (1/j) sum_{i=1..j} (-1)^{i+1} pfi_i fi_{j-i}, with fi_0 = 1.
inline InteractionStack interaction_recursion(const Representations& reprs, std::size_t t,
                                              std::uint64_t* multiplies = nullptr) {
    detail::require_order(t);
    const std::size_t k = detail::repr_width(reprs);
    InteractionStack s;
    s.t = t;
    s.pfi = power_sums(reprs, t, multiplies);
    s.fi.assign(t, std::vector<double>(k, 0.0));
    s.fi[0] = s.pfi[0];
    std::uint64_t count = 0;
    for (std::size_t j = 2; j <= t; ++j) {
        auto& out = s.fi[j - 1];
        // i = j pairs pfi_j with fi_0 = 1.
        const double last_sign = (j % 2 == 1) ? 1.0 : -1.0;
        for (std::size_t d = 0; d < k; ++d) out[d] = last_sign * s.pfi[j - 1][d];
        for (std::size_t i = 1; i < j; ++i) {
            const auto& p = s.pfi[i - 1];
            const auto& f = s.fi[j - i - 1];
            if (i % 2 == 1) {
                for (std::size_t d = 0; d < k; ++d) out[d] += p[d] * f[d];
            } else {
                for (std::size_t d = 0; d < k; ++d) out[d] -= p[d] * f[d];
            }
            count += k;
        }
        for (std::size_t d = 0; d < k; ++d) out[d] /= static_cast<double>(j);
        count += k;
        // No j-subsets exist; drop the cancellation residue.
        if (j > reprs.size()) std::fill(out.begin(), out.end(), 0.0);
    }
    if (multiplies) *multiplies += count;
    return s;
}

// ---------------------------------------------------------------------------
// Differentiable version used by the model
// ---------------------------------------------------------------------------

/// Same recursion over n x k representation tensors; returns fi_1..fi_t,
/// each n x k, differentiable with respect to the representations.
inline std::vector<Tensor> interaction_orders(const std::vector<Tensor>& reprs, std::size_t t) {
    detail::require_order(t);
    if (reprs.empty()) throw DimensionError("interactions: need at least one representation");
    for (const auto& r : reprs) detail::require_same_shape(reprs.front(), r, "interaction_orders");

    std::vector<Tensor> powers = reprs;
    std::vector<Tensor> pfi;
    pfi.reserve(t);
    for (std::size_t j = 1; j <= t; ++j) {
        if (j > 1) {
            for (std::size_t i = 0; i < reprs.size(); ++i) powers[i] = mul(powers[i], reprs[i]);
        }
        Tensor s = powers.front();
        for (std::size_t i = 1; i < powers.size(); ++i) s = add(s, powers[i]);
        pfi.push_back(s);
    }

    std::vector<Tensor> fi{pfi.front()};
    fi.reserve(t);
    for (std::size_t j = 2; j <= t; ++j) {
        Tensor acc = (j % 2 == 1) ? pfi[j - 1] : neg(pfi[j - 1]);
        for (std::size_t i = 1; i < j; ++i) {
            const Tensor term = mul(pfi[i - 1], fi[j - i - 1]);
            acc = (i % 2 == 1) ? add(acc, term) : sub(acc, term);
        }
        if (j > reprs.size()) {
            fi.push_back(Tensor::zeros(acc.rows(), acc.cols()));
        } else {
            fi.push_back(scale(acc, 1.0 / static_cast<double>(j)));
        }
    }
    return fi;
}

// ---------------------------------------------------------------------------
// CrossNet
// ---------------------------------------------------------------------------

/// Layered feature crossing: g_1 = x W_1, g_j = (g_1 . g_{j-1}) W_j.
/// No activations anywhere, so g_t is a degree-t polynomial in x that
/// includes self-powers.
struct CrossNetStack {
    std::vector<Tensor> weights;  // W_1: m x k, then W_2..W_t: k x k

    std::size_t order() const { return weights.size(); }

    static CrossNetStack init(std::size_t m, std::size_t k, std::size_t t, Rng& rng) {
        detail::require_order(t);
        CrossNetStack s;
        s.weights.push_back(Tensor::parameter(
            m, k, normal_draws(rng, m * k, 0.0, std::sqrt(1.0 / static_cast<double>(m)))));
        for (std::size_t j = 2; j <= t; ++j) {
            s.weights.push_back(Tensor::parameter(
                k, k, normal_draws(rng, k * k, 0.0, std::sqrt(1.0 / static_cast<double>(k)))));
        }
        return s;
    }

    std::vector<Tensor> parameters() const { return weights; }
};

/// Returns g_t for t = stack.order().
inline Tensor crossnet_forward(const Tensor& x, const CrossNetStack& stack) {
    if (stack.weights.empty()) throw ConfigError("crossnet: empty stack");
    const std::size_t k = stack.weights.front().cols();
    for (std::size_t j = 1; j < stack.weights.size(); ++j) {
        const auto& w = stack.weights[j];
        if (w.rows() != k || w.cols() != k) {
            throw DimensionError("crossnet: W_" + std::to_string(j + 1) + " must be " +
                                 detail::shape_str(k, k) + ", got " + w.shape_str());
        }
    }
    const Tensor g1 = matmul(x, stack.weights.front());
    Tensor g = g1;
    for (std::size_t j = 1; j < stack.weights.size(); ++j) g = matmul(mul(g1, g), stack.weights[j]);
    return g;
}

// ---------------------------------------------------------------------------
// Cost model
// ---------------------------------------------------------------------------

enum class KernelKind { enumeration, recursion, crossnet };

inline const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::enumeration: return "enumeration";
        case KernelKind::recursion: return "recursion";
        case KernelKind::crossnet: return "crossnet";
    }
    return "?";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "enumeration") return KernelKind::enumeration;
    if (s == "recursion") return KernelKind::recursion;
    if (s == "crossnet") return KernelKind::crossnet;
    throw ConfigError("unknown kernel '" + s + "'");
}

/// Binomial coefficient; saturates at UINT64_MAX instead of overflowing.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

struct KernelCost {
    std::uint64_t multiplies = 0;
    std::uint64_t additions = 0;
};

/// Exact scalar operation counts of one kernel evaluation, matching what
/// the implementations above perform (division by the order counts as a
/// multiply). Sign flips are not counted.
inline KernelCost count_kernel_ops(KernelKind kind, std::uint64_t m, std::uint64_t k, std::uint64_t t) {
    if (m == 0 || k == 0 || t == 0) throw ConfigError("count_kernel_ops: parameters must be positive");
    KernelCost c;
    switch (kind) {
        case KernelKind::enumeration: {
            const std::uint64_t subsets = binomial(m, t);
            c.multiplies = subsets * (t - 1) * k;
            c.additions = subsets * k;
            break;
        }
        case KernelKind::recursion:
            c.multiplies = (t - 1) * m * k + (t * (t - 1) / 2) * k + (t - 1) * k;
            c.additions = t * m * k + (t * (t - 1) / 2) * k;
            break;
        case KernelKind::crossnet:
            c.multiplies = m * k + (t - 1) * (k + k * k);
            c.additions = m * k + (t - 1) * k * k;
            break;
    }
    return c;
}

}  // namespace honam
