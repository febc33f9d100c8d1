#pragma once

// Reverse-mode differentiation over dense row-major 2-D arrays of doubles.
//
// A Tensor is a cheap handle onto a graph node. Operations allocate a new
// node that remembers its parents and a closure that pushes the node's
// gradient back to them. backward() orders the graph topologically once and
// replays the closures in reverse. Parameters are long-lived leaves whose
// gradients accumulate until zero_grad(); everything else is rebuilt on each
// forward pass.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "honam/errors.hpp"

namespace honam {

class Tensor;

namespace detail {

struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;
    bool parameter = false;
    bool requires_grad = false;
    bool replayed = false;

    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

inline std::string shape_str(std::size_t r, std::size_t c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

}  // namespace detail

class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::size_t rows, std::size_t cols) {
        return from_values(rows, cols, std::vector<double>(rows * cols, 0.0));
    }

    static Tensor full(std::size_t rows, std::size_t cols, double v) {
        return from_values(rows, cols, std::vector<double>(rows * cols, v));
    }

    static Tensor scalar(double v) { return from_values(1, 1, {v}); }

    /// Constant (non-differentiable) tensor.
    static Tensor from_values(std::size_t rows, std::size_t cols, std::vector<double> values) {
        if (values.size() != rows * cols) {
            throw DimensionError("tensor: " + std::to_string(values.size()) +
                                 " values for shape " + detail::shape_str(rows, cols));
        }
        auto n = std::make_shared<detail::Node>();
        n->rows = rows;
        n->cols = cols;
        n->value = std::move(values);
        return Tensor(std::move(n));
    }

    /// Nested-list convenience for small literals, e.g. {{1, 2}, {3, 4}}.
    static Tensor from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        std::vector<double> v;
        v.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c) throw DimensionError("tensor: ragged row list");
            v.insert(v.end(), row.begin(), row.end());
        }
        return from_values(r, c, std::move(v));
    }

    /// Trainable leaf that persists across forward passes.
    static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<double> values) {
        Tensor t = from_values(rows, cols, std::move(values));
        t.node_->parameter = true;
        t.node_->requires_grad = true;
        t.node_->ensure_grad();
        return t;
    }

    bool defined() const { return static_cast<bool>(node_); }
    std::size_t rows() const { return node_->rows; }
    std::size_t cols() const { return node_->cols; }
    std::size_t size() const { return node_->value.size(); }
    bool is_parameter() const { return node_->parameter; }
    bool requires_grad() const { return node_->requires_grad; }

    double operator()(std::size_t r, std::size_t c) const { return node_->value[r * node_->cols + c]; }
    double item() const {
        if (size() != 1) throw DimensionError("item() on " + shape_str());
        return node_->value.front();
    }

    std::span<const double> values() const { return node_->value; }
    std::span<double> mutable_values() { return node_->value; }

    /// Gradient buffer; all zeros until a backward pass reaches this node.
    std::span<const double> grad() const {
        node_->ensure_grad();
        return node_->grad;
    }
    std::span<double> mutable_grad() {
        node_->ensure_grad();
        return node_->grad;
    }

    void zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

    std::string shape_str() const { return detail::shape_str(rows(), cols()); }

    /// Identity of the underlying node (handles may alias).
    const detail::Node* id() const { return node_.get(); }

    // Internal: used by the op builders below.
    explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
    const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

namespace detail {

// Creates the result node for an op. The closure only runs when at least one
// parent takes part in differentiation.
inline Tensor make_result(std::size_t rows, std::size_t cols, std::vector<double> value,
                          std::vector<Tensor> parents, std::function<void(Node&)> backprop) {
    auto n = std::make_shared<Node>();
    n->rows = rows;
    n->cols = cols;
    n->value = std::move(value);
    for (auto& p : parents) {
        n->requires_grad = n->requires_grad || p.requires_grad();
        n->parents.push_back(p.node());
    }
    if (n->requires_grad) n->backprop = std::move(backprop);
    return Tensor(std::move(n));
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                             b.shape_str());
    }
}

// Gradient slot of parent `i` when that parent wants one, else nullptr.
inline double* parent_grad(Node& self, std::size_t i) {
    Node& p = *self.parents[i];
    if (!p.requires_grad) return nullptr;
    p.ensure_grad();
    return p.grad.data();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions differ, " + a.shape_str() + " times " +
                             b.shape_str());
    }
    const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
    std::vector<double> out(n * q, 0.0);
    const double* A = a.values().data();
    const double* B = b.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        double* orow = out.data() + i * q;
        for (std::size_t k = 0; k < p; ++k) {
            const double aik = A[i * p + k];
            if (aik == 0.0) continue;
            const double* brow = B + k * q;
            for (std::size_t j = 0; j < q; ++j) orow[j] += aik * brow[j];
        }
    }
    return detail::make_result(n, q, std::move(out), {a, b}, [n, p, q](detail::Node& self) {
        const double* G = self.grad.data();
        const double* A = self.parents[0]->value.data();
        const double* B = self.parents[1]->value.data();
        if (double* dA = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < n; ++i) {
                const double* grow = G + i * q;
                for (std::size_t k = 0; k < p; ++k) {
                    const double* brow = B + k * q;
                    double s = 0.0;
                    for (std::size_t j = 0; j < q; ++j) s += grow[j] * brow[j];
                    dA[i * p + k] += s;
                }
            }
        }
        if (double* dB = detail::parent_grad(self, 1)) {
            for (std::size_t i = 0; i < n; ++i) {
                const double* grow = G + i * q;
                for (std::size_t k = 0; k < p; ++k) {
                    const double aik = A[i * p + k];
                    if (aik == 0.0) continue;
                    double* drow = dB + k * q;
                    for (std::size_t j = 0; j < q; ++j) drow[j] += aik * grow[j];
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Element-wise arithmetic
// ---------------------------------------------------------------------------

inline Tensor add(const Tensor& a, const Tensor& b) {
    detail::require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](detail::Node& self) {
        const std::size_t n = self.grad.size();
        for (std::size_t pi = 0; pi < 2; ++pi) {
            if (double* d = detail::parent_grad(self, pi)) {
                for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[i];
            }
        }
    });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
    detail::require_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](detail::Node& self) {
        const std::size_t n = self.grad.size();
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[i];
        }
        if (double* d = detail::parent_grad(self, 1)) {
            for (std::size_t i = 0; i < n; ++i) d[i] -= self.grad[i];
        }
    });
}

/// Hadamard product.
inline Tensor mul(const Tensor& a, const Tensor& b) {
    detail::require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](detail::Node& self) {
        const std::size_t n = self.grad.size();
        const double* av = self.parents[0]->value.data();
        const double* bv = self.parents[1]->value.data();
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[i] * bv[i];
        }
        if (double* d = detail::parent_grad(self, 1)) {
            for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[i] * av[i];
        }
    });
}

inline Tensor scale(const Tensor& a, double s) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a.values()[i];
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a}, [s](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += s * self.grad[i];
        }
    });
}

inline Tensor neg(const Tensor& a) { return scale(a, -1.0); }

inline Tensor add_scalar(const Tensor& a, double s) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + s;
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a}, [](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
        }
    });
}

/// Element-wise x^power for a non-negative integer power.
inline Tensor pow_int(const Tensor& a, int power) {
    if (power < 0) throw ConfigError("pow_int: negative exponent " + std::to_string(power));
    auto ipow = [](double x, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= x;
        return r;
    };
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ipow(a.values()[i], power);
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a},
                               [power, ipow](detail::Node& self) {
                                   if (power == 0) return;
                                   double* d = detail::parent_grad(self, 0);
                                   if (!d) return;
                                   const double* x = self.parents[0]->value.data();
                                   for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                       d[i] += self.grad[i] * power * ipow(x[i], power - 1);
                                   }
                               });
}

inline Tensor exp(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(a.values()[i]);
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a}, [](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * self.value[i];
        }
    });
}

enum class Elementwise { add, sub, mul, pow_int, exp, neg, scale };

/// Kind-dispatched front end over the element-wise primitives. For pow_int
/// and scale the scalar operand is the exponent / factor; unary kinds ignore it.
inline Tensor elementwise(Elementwise kind, const Tensor& a, const Tensor& b) {
    const bool scalar_b = b.rows() == 1 && b.cols() == 1 &&
                          !(a.rows() == 1 && a.cols() == 1);
    switch (kind) {
        case Elementwise::add:
            return scalar_b ? add_scalar(a, b.item()) : add(a, b);
        case Elementwise::sub:
            return scalar_b ? add_scalar(a, -b.item()) : sub(a, b);
        case Elementwise::mul:
            return scalar_b ? scale(a, b.item()) : mul(a, b);
        case Elementwise::pow_int: {
            const double e = b.item();
            if (e != std::floor(e)) throw ConfigError("pow_int: exponent must be an integer");
            return pow_int(a, static_cast<int>(e));
        }
        case Elementwise::exp:
            return exp(a);
        case Elementwise::neg:
            return neg(a);
        case Elementwise::scale:
            return scale(a, b.item());
    }
    throw ConfigError("elementwise: unknown kind");
}

inline Tensor elementwise(Elementwise kind, const Tensor& a, double s) {
    return elementwise(kind, a, Tensor::scalar(s));
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class ActivationKind { identity, relu, relu_n, leaky_relu };

struct Activation {
    ActivationKind kind = ActivationKind::identity;
    /// Cap for relu_n, negative slope for leaky_relu; ignored otherwise.
    double param = 0.0;

    static Activation identity() { return {ActivationKind::identity, 0.0}; }
    static Activation relu() { return {ActivationKind::relu, 0.0}; }
    static Activation relu_n(double n = 1.0) { return {ActivationKind::relu_n, n}; }
    static Activation leaky_relu(double slope = 0.01) { return {ActivationKind::leaky_relu, slope}; }

    void validate() const {
        if (kind == ActivationKind::relu_n && !(param > 0.0)) {
            throw ConfigError("relu_n: cap must be positive, got " + std::to_string(param));
        }
        if (kind == ActivationKind::leaky_relu && !(param > 0.0 && param < 1.0)) {
            throw ConfigError("leaky_relu: slope must lie in (0,1), got " + std::to_string(param));
        }
    }

    bool operator==(const Activation&) const = default;
};

inline const char* to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::identity: return "identity";
        case ActivationKind::relu: return "relu";
        case ActivationKind::relu_n: return "relu_n";
        case ActivationKind::leaky_relu: return "leaky_relu";
    }
    return "?";
}

inline ActivationKind activation_kind_from_string(const std::string& s) {
    if (s == "identity") return ActivationKind::identity;
    if (s == "relu") return ActivationKind::relu;
    if (s == "relu_n") return ActivationKind::relu_n;
    if (s == "leaky_relu") return ActivationKind::leaky_relu;
    throw ConfigError("unknown activation '" + s + "'");
}

/// Kinks take the derivative of the flat side: 0 for relu/relu_n, the slope
/// for leaky_relu.
inline Tensor activation(const Tensor& a, Activation act) {
    act.validate();
    if (act.kind == ActivationKind::identity) return a;
    const std::size_t n = a.size();
    std::vector<double> out(n);
    std::vector<double> deriv(n);
    const double* x = a.values().data();
    switch (act.kind) {
        case ActivationKind::relu:
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = x[i] > 0.0 ? x[i] : 0.0;
                deriv[i] = x[i] > 0.0 ? 1.0 : 0.0;
            }
            break;
        case ActivationKind::relu_n:
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = std::min(std::max(0.0, x[i]), act.param);
                deriv[i] = (x[i] > 0.0 && x[i] < act.param) ? 1.0 : 0.0;
            }
            break;
        case ActivationKind::leaky_relu:
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = x[i] > 0.0 ? x[i] : act.param * x[i];
                deriv[i] = x[i] > 0.0 ? 1.0 : act.param;
            }
            break;
        case ActivationKind::identity:
            break;
    }
    return detail::make_result(a.rows(), a.cols(), std::move(out), {a},
                               [deriv = std::move(deriv)](detail::Node& self) {
                                   if (double* d = detail::parent_grad(self, 0)) {
                                       for (std::size_t i = 0; i < deriv.size(); ++i) {
                                           d[i] += self.grad[i] * deriv[i];
                                       }
                                   }
                               });
}

inline Tensor relu(const Tensor& a) { return activation(a, Activation::relu()); }
inline Tensor relu_n(const Tensor& a, double n) { return activation(a, Activation::relu_n(n)); }
inline Tensor leaky_relu(const Tensor& a, double slope) {
    return activation(a, Activation::leaky_relu(slope));
}

// ---------------------------------------------------------------------------
// Reductions and reshaping
// ---------------------------------------------------------------------------

inline Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    return detail::make_result(1, 1, {s}, {a}, [](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            const std::size_t n = self.parents[0]->value.size();
            for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[0];
        }
    });
}

inline Tensor mean(const Tensor& a) {
    if (a.size() == 0) throw DimensionError("mean of empty tensor");
    return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

/// Column j as an n x 1 tensor.
inline Tensor column(const Tensor& a, std::size_t j) {
    if (j >= a.cols()) {
        throw DimensionError("column " + std::to_string(j) + " out of range for " + a.shape_str());
    }
    const std::size_t n = a.rows(), c = a.cols();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a(i, j);
    return detail::make_result(n, 1, std::move(out), {a}, [j, c](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[i * c + j] += self.grad[i];
        }
    });
}

/// Columns [begin, end) as an n x (end-begin) tensor.
inline Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
    if (begin > end || end > a.cols()) {
        throw DimensionError("slice_cols [" + std::to_string(begin) + "," + std::to_string(end) +
                             ") out of range for " + a.shape_str());
    }
    const std::size_t n = a.rows(), c = a.cols(), w = end - begin;
    std::vector<double> out(n * w);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < w; ++j) out[i * w + j] = a(i, begin + j);
    }
    return detail::make_result(n, w, std::move(out), {a}, [begin, c, w](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            const std::size_t n = self.rows;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < w; ++j) d[i * c + begin + j] += self.grad[i * w + j];
            }
        }
    });
}

/// Rows [begin, end) as an (end-begin) x cols tensor.
inline Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
    if (begin > end || end > a.rows()) {
        throw DimensionError("slice_rows out of range for " + a.shape_str());
    }
    const std::size_t c = a.cols();
    std::vector<double> out(a.values().begin() + static_cast<std::ptrdiff_t>(begin * c),
                            a.values().begin() + static_cast<std::ptrdiff_t>(end * c));
    return detail::make_result(end - begin, c, std::move(out), {a}, [begin, c](detail::Node& self) {
        if (double* d = detail::parent_grad(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[begin * c + i] += self.grad[i];
        }
    });
}

/// Horizontal concatenation; all parts must share the row count.
inline Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: no parts");
    const std::size_t n = parts.front().rows();
    std::size_t total = 0;
    std::vector<std::size_t> offsets;
    for (const auto& p : parts) {
        if (p.rows() != n) {
            throw DimensionError("concat_cols: row mismatch " + parts.front().shape_str() + " vs " +
                                 p.shape_str());
        }
        offsets.push_back(total);
        total += p.cols();
    }
    std::vector<double> out(n * total);
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& p = parts[pi];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p.cols(); ++j) out[i * total + offsets[pi] + j] = p(i, j);
        }
    }
    return detail::make_result(n, total, std::move(out), parts,
                               [offsets, total](detail::Node& self) {
                                   const std::size_t n = self.rows;
                                   for (std::size_t pi = 0; pi < self.parents.size(); ++pi) {
                                       double* d = detail::parent_grad(self, pi);
                                       if (!d) continue;
                                       const std::size_t w = self.parents[pi]->cols;
                                       for (std::size_t i = 0; i < n; ++i) {
                                           for (std::size_t j = 0; j < w; ++j) {
                                               d[i * w + j] += self.grad[i * total + offsets[pi] + j];
                                           }
                                       }
                                   }
                               });
}

/// n x 1 column of ones, used to lift a 1 x q bias row to n x q via matmul.
inline Tensor ones_column(std::size_t n) { return Tensor::full(n, 1, 1.0); }

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// Mean squared error between an n x 1 prediction and an n x 1 target.
inline Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    detail::require_same_shape(pred, target, "mse_loss");
    const Tensor diff = sub(pred, target);
    return mean(mul(diff, diff));
}

/// Mean logistic loss on logits; labels in {0,1}. Evaluated in the
/// overflow-free form max(z,0) - y z + log1p(exp(-|z|)).
inline Tensor logistic_loss(const Tensor& logits, const Tensor& labels) {
    detail::require_same_shape(logits, labels, "logistic_loss");
    const std::size_t n = logits.size();
    if (n == 0) throw DimensionError("logistic_loss on empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = logits.values()[i];
        const double y = labels.values()[i];
        total += std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
    }
    return detail::make_result(1, 1, {total / static_cast<double>(n)}, {logits, labels},
                               [n](detail::Node& self) {
                                   double* d = detail::parent_grad(self, 0);
                                   if (!d) return;
                                   const double* z = self.parents[0]->value.data();
                                   const double* y = self.parents[1]->value.data();
                                   const double g = self.grad[0] / static_cast<double>(n);
                                   for (std::size_t i = 0; i < n; ++i) {
                                       const double p = 1.0 / (1.0 + std::exp(-z[i]));
                                       d[i] += g * (p - y[i]);
                                   }
                               });
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

/// Topologically ordered record of the nodes one loss depends on. Replaying
/// it runs each node's backward closure exactly once, outputs first.
class GraphTape {
public:
    static GraphTape record(const Tensor& loss) {
        GraphTape tape;
        tape.root_ = loss.node();
        std::unordered_set<const detail::Node*> seen;
        // Iterative post-order DFS; deep graphs must not blow the stack.
        std::vector<std::pair<detail::Node*, std::size_t>> stack;
        if (loss.requires_grad()) stack.emplace_back(loss.node().get(), 0);
        seen.insert(loss.node().get());
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < node->parents.size()) {
                detail::Node* p = node->parents[next++].get();
                if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
            } else {
                tape.order_.push_back(node);
                stack.pop_back();
            }
        }
        return tape;
    }

    std::size_t size() const { return order_.size(); }

    void replay() {
        if (root_->replayed) {
            throw StateError("backward: tape already replayed; run a new forward pass first");
        }
        root_->replayed = true;
        if (order_.empty()) return;
        root_->ensure_grad();
        root_->grad[0] += 1.0;
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            detail::Node* n = *it;
            if (n->backprop) {
                n->ensure_grad();
                n->backprop(*n);
            }
        }
    }

private:
    std::shared_ptr<detail::Node> root_;
    std::vector<detail::Node*> order_;
};

/// Fills d(loss)/d(param) into every reachable parameter's grad buffer
/// (accumulating onto whatever is already there).
inline void backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1) {
        throw DimensionError("backward: loss must be 1x1, got " + loss.shape_str());
    }
    GraphTape::record(loss).replay();
}

}  // namespace honam
