#pragma once

// Full additive model with interaction orders 1..t:
//
//   r_i  = f_i(x_i)                          (feature networks, n x k each)
//   fi_j = j-th elementary symmetric sum of r_1..r_m
//   yhat = [fi_1 | fi_2 | ... | fi_t] W + b
//
// Rows [(p-1)k, pk) of W belong to order p. Every interpretation routine
// below relies on that slicing.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "honam/errors.hpp"
#include "honam/feature_nets.hpp"
#include "honam/interactions.hpp"
#include "honam/matrix.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"

namespace honam {

enum class Task { regression, binary_classification };

inline const char* to_string(Task t) {
    return t == Task::regression ? "regression" : "binary-classification";
}

inline Task task_from_string(const std::string& s) {
    if (s == "regression") return Task::regression;
    if (s == "binary-classification" || s == "classification") return Task::binary_classification;
    throw ConfigError("unknown task '" + s + "'");
}

struct ModelConfig {
    std::size_t m = 1;
    std::size_t order = 2;
    Task task = Task::regression;
    FeatureNetConfig net;

    void validate() const {
        if (m == 0) throw ConfigError("model: feature count must be positive");
        if (order == 0) throw ConfigError("model: interaction order must be at least 1");
        net.validate();
    }
};

/// One attribution term: the features in the subset and its additive share.
struct Contribution {
    std::vector<std::size_t> features;
    double value = 0.0;
};

/// Additive decomposition of a single prediction.
struct ContributionReport {
    std::vector<Contribution> terms;  // every listed subset, ascending order
    /// Orders above the enumeration cap, reported as fi_p . W_p totals.
    std::map<std::size_t, double> order_totals;
    double bias = 0.0;
    double total = 0.0;  // bias + every term + every order total

    double value_of(std::vector<std::size_t> features) const {
        std::sort(features.begin(), features.end());
        for (const auto& c : terms) {
            if (c.features == features) return c.value;
        }
        throw ConfigError("contribution report: subset not listed");
    }

    std::size_t count_of_order(std::size_t p) const {
        return static_cast<std::size_t>(std::count_if(
            terms.begin(), terms.end(), [p](const Contribution& c) { return c.features.size() == p; }));
    }
};

class HonamModel {
public:
    HonamModel() = default;

    HonamModel(ModelConfig cfg, FeatureNetBank bank, Tensor head_w, Tensor head_b)
        : cfg_(std::move(cfg)), bank_(std::move(bank)), head_w_(std::move(head_w)),
          head_b_(std::move(head_b)) {
        cfg_.validate();
        if (bank_.m() != cfg_.m) throw DimensionError("model: bank size differs from m");
        if (head_w_.rows() != cfg_.order * bank_.k() || head_w_.cols() != 1) {
            throw DimensionError("model: head weight must be " +
                                 detail::shape_str(cfg_.order * bank_.k(), 1) + ", got " +
                                 head_w_.shape_str());
        }
        if (head_b_.rows() != 1 || head_b_.cols() != 1) throw DimensionError("model: head bias must be 1x1");
    }

    static HonamModel init(const ModelConfig& cfg, Rng& rng) {
        cfg.validate();
        FeatureNetBank bank = FeatureNetBank::init(cfg.m, cfg.net, rng);
        const std::size_t in = cfg.order * cfg.net.k;
        Tensor w = Tensor::parameter(in, 1, normal_draws(rng, in, 0.0, std::sqrt(2.0 / static_cast<double>(in))));
        Tensor b = Tensor::parameter(1, 1, {0.0});
        return HonamModel(cfg, std::move(bank), std::move(w), std::move(b));
    }

    const ModelConfig& config() const { return cfg_; }
    std::size_t m() const { return cfg_.m; }
    std::size_t k() const { return bank_.k(); }
    std::size_t order() const { return cfg_.order; }
    Task task() const { return cfg_.task; }
    const FeatureNetBank& bank() const { return bank_; }
    FeatureNetBank& bank() { return bank_; }
    const Tensor& head_weight() const { return head_w_; }
    const Tensor& head_bias() const { return head_b_; }
    double bias() const { return head_b_.item(); }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> ps = bank_.parameters();
        ps.push_back(head_w_);
        ps.push_back(head_b_);
        return ps;
    }

    std::vector<Tensor> head_parameters() const { return {head_w_, head_b_}; }

    // -- ablation -----------------------------------------------------------

    /// Zeroes the representations of `features` in every later forward.
    /// Set-based and reversible; weights are untouched.
    void ablate(const std::set<std::size_t>& features) {
        for (auto f : features) {
            if (f >= cfg_.m) throw ConfigError("ablate: feature " + std::to_string(f) + " out of range");
        }
        ablated_.insert(features.begin(), features.end());
    }
    void restore(const std::set<std::size_t>& features) {
        for (auto f : features) ablated_.erase(f);
    }
    void clear_ablation() { ablated_.clear(); }
    const std::set<std::size_t>& ablated() const { return ablated_; }
    bool is_ablated(std::size_t i) const { return ablated_.count(i) != 0; }

    // -- forward ------------------------------------------------------------

    /// Representations with ablated features replaced by zeros.
    std::vector<Tensor> representations(const Tensor& x) const {
        check_input(x);
        std::vector<Tensor> reprs;
        reprs.reserve(cfg_.m);
        for (std::size_t i = 0; i < cfg_.m; ++i) {
            if (is_ablated(i)) {
                reprs.push_back(Tensor::zeros(x.rows(), k()));
            } else {
                reprs.push_back(bank_.feature_net_forward(column(x, i), i));
            }
        }
        return reprs;
    }

    /// n x 1 output (a logit for classification).
    Tensor forward(const Tensor& x) const {
        const auto reprs = representations(x);
        const auto fi = interaction_orders(reprs, cfg_.order);
        const Tensor features = fi.size() == 1 ? fi.front() : concat_cols(fi);
        return add(matmul(features, head_w_), matmul(ones_column(x.rows()), head_b_));
    }

    /// Forward over a plain matrix, chunked to bound graph memory.
    std::vector<double> predict(const Matrix& x, std::size_t chunk = 4096) const {
        std::vector<double> out;
        out.reserve(x.rows);
        for (std::size_t begin = 0; begin < x.rows; begin += chunk) {
            const std::size_t end = std::min(x.rows, begin + chunk);
            std::vector<double> vals(x.data.begin() + static_cast<std::ptrdiff_t>(begin * x.cols),
                                     x.data.begin() + static_cast<std::ptrdiff_t>(end * x.cols));
            const Tensor y = forward(Tensor::from_values(end - begin, x.cols, std::move(vals)));
            out.insert(out.end(), y.values().begin(), y.values().end());
        }
        return out;
    }

    // -- interpretation -----------------------------------------------------

    /// Additive attribution of one row. Subsets are enumerated for orders up
    /// to min(max_order, enumerate_cap); orders above that are reported as
    /// aggregate totals.
    ContributionReport local_contributions(std::span<const double> row, std::size_t max_order,
                                           std::size_t enumerate_cap = 3) const {
        if (max_order == 0 || max_order > cfg_.order) {
            throw UnsupportedOrderError("local_contributions: max_order " + std::to_string(max_order) +
                                        " not in [1, " + std::to_string(cfg_.order) + "]");
        }
        if (row.size() != cfg_.m) {
            throw ContractError("local_contributions: row has " + std::to_string(row.size()) +
                                " values, model expects " + std::to_string(cfg_.m));
        }
        const Representations r = row_representations(row);
        const std::size_t kk = k();
        const auto w = head_w_.values();

        ContributionReport rep;
        rep.bias = bias();
        rep.total = rep.bias;
        const std::size_t listed = std::min(max_order, enumerate_cap);
        std::vector<double> prod(kk);
        for (std::size_t p = 1; p <= listed && p <= cfg_.m; ++p) {
            std::vector<std::size_t> idx(p);
            for (std::size_t l = 0; l < p; ++l) idx[l] = l;
            while (true) {
                prod = r[idx[0]];
                for (std::size_t l = 1; l < p; ++l) {
                    for (std::size_t d = 0; d < kk; ++d) prod[d] *= r[idx[l]][d];
                }
                double v = 0.0;
                for (std::size_t d = 0; d < kk; ++d) v += prod[d] * w[(p - 1) * kk + d];
                rep.terms.push_back({idx, v});
                rep.total += v;

                std::size_t pos = p;
                while (pos > 0 && idx[pos - 1] == cfg_.m - p + pos - 1) --pos;
                if (pos == 0) break;
                ++idx[pos - 1];
                for (std::size_t l = pos; l < p; ++l) idx[l] = idx[l - 1] + 1;
            }
        }
        if (max_order > listed) {
            const InteractionStack s = interaction_recursion(r, max_order);
            for (std::size_t p = listed + 1; p <= max_order; ++p) {
                double v = 0.0;
                for (std::size_t d = 0; d < kk; ++d) v += s.fi[p - 1][d] * w[(p - 1) * kk + d];
                rep.order_totals[p] = v;
                rep.total += v;
            }
        }
        return rep;
    }

    /// Order-1 contribution of feature i at each grid value.
    std::vector<double> global_shape(std::size_t i, std::span<const double> grid) const {
        if (i >= cfg_.m) throw ConfigError("global_shape: feature " + std::to_string(i) + " out of range");
        std::vector<double> out(grid.size(), 0.0);
        if (grid.empty() || is_ablated(i)) return out;
        const Tensor r = bank_.feature_net_forward(column_tensor(grid), i);
        const auto w = head_w_.values();
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double v = 0.0;
            for (std::size_t d = 0; d < k(); ++d) v += r(g, d) * w[d];
            out[g] = v;
        }
        return out;
    }

    /// Order-2 heat map: out(u, v) = (r_i(grid_i[u]) . r_j(grid_j[v])) W_2.
    Matrix global_pair_shape(std::size_t i, std::size_t j, std::span<const double> grid_i,
                             std::span<const double> grid_j) const {
        if (cfg_.order < 2) throw UnsupportedOrderError("pair shape needs an order >= 2 model");
        if (i >= cfg_.m || j >= cfg_.m || i == j) throw ConfigError("global_pair_shape: invalid feature pair");
        if (grid_i.empty() || grid_j.empty()) throw ConfigError("global_pair_shape: empty grid");
        Matrix out(grid_i.size(), grid_j.size(), 0.0);
        if (is_ablated(i) || is_ablated(j)) return out;
        const Tensor ri = bank_.feature_net_forward(column_tensor(grid_i), i);
        const Tensor rj = bank_.feature_net_forward(column_tensor(grid_j), j);
        const auto w = head_w_.values();
        const std::size_t kk = k();
        for (std::size_t u = 0; u < grid_i.size(); ++u) {
            for (std::size_t v = 0; v < grid_j.size(); ++v) {
                double s = 0.0;
                for (std::size_t d = 0; d < kk; ++d) s += ri(u, d) * rj(v, d) * w[kk + d];
                out(u, v) = s;
            }
        }
        return out;
    }

    /// Copies share parameter storage with the original; clone() does not.
    HonamModel clone() const {
        Rng rng(0);
        HonamModel c = init(cfg_, rng);
        c.assign_values(*this);
        c.ablated_ = ablated_;
        c.metadata_ = metadata_;
        c.schema_hash_ = schema_hash_;
        return c;
    }

    /// Overwrites every stored tensor with the values of `other`, which must
    /// share this model's architecture.
    void assign_values(const HonamModel& other) {
        auto dst = stored_tensors();
        const auto src = other.stored_tensors();
        if (dst.size() != src.size()) throw DimensionError("assign_values: architectures differ");
        for (std::size_t i = 0; i < dst.size(); ++i) {
            if (dst[i].rows() != src[i].rows() || dst[i].cols() != src[i].cols()) {
                throw DimensionError("assign_values: tensor " + std::to_string(i) + " is " +
                                     dst[i].shape_str() + " vs " + src[i].shape_str());
            }
            std::copy(src[i].values().begin(), src[i].values().end(), dst[i].mutable_values().begin());
        }
    }

    // -- persistence hooks ----------------------------------------------------

    /// Opaque caller-owned payload stored alongside the model (the CLI keeps
    /// the schema and fitted preprocessor here).
    const std::string& metadata() const { return metadata_; }
    void set_metadata(std::string s) { metadata_ = std::move(s); }
    std::uint64_t schema_hash() const { return schema_hash_; }
    void set_schema_hash(std::uint64_t h) { schema_hash_ = h; }

    /// Every tensor persisted in a model file, in file order. Unlike
    /// parameters() this includes constant (non-trainable) shifts.
    std::vector<Tensor> stored_tensors() const {
        std::vector<Tensor> ts;
        for (const auto& net : bank_.nets()) {
            for (const auto& l : net.layers()) {
                ts.push_back(l.weight);
                ts.push_back(l.bias);
            }
        }
        ts.push_back(head_w_);
        ts.push_back(head_b_);
        return ts;
    }

private:
    void check_input(const Tensor& x) const {
        if (x.cols() != cfg_.m) {
            throw ContractError("model expects " + std::to_string(cfg_.m) + " features, input has " +
                                std::to_string(x.cols()));
        }
    }

    Representations row_representations(std::span<const double> row) const {
        const Tensor x = Tensor::from_values(1, row.size(), std::vector<double>(row.begin(), row.end()));
        const auto reprs = representations(x);
        Representations out;
        out.reserve(reprs.size());
        for (const auto& t : reprs) out.emplace_back(t.values().begin(), t.values().end());
        return out;
    }

    ModelConfig cfg_;
    FeatureNetBank bank_;
    Tensor head_w_;
    Tensor head_b_;
    std::set<std::size_t> ablated_;
    std::string metadata_;
    std::uint64_t schema_hash_ = 0;
};

}  // namespace honam
