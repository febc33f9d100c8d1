#pragma once

// Mini-batch training with per-epoch validation and best-snapshot selection,
// plus the JSON run configuration shared by the command-line tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "honam/data.hpp"
#include "honam/errors.hpp"
#include "honam/matrix.hpp"
#include "honam/metrics.hpp"
#include "honam/model.hpp"
#include "honam/random.hpp"
#include "honam/tensor.hpp"

namespace honam {

enum class OptimizerKind { adam, sgd };
enum class SelectionMetric { task, loss };

inline const char* to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }
inline const char* to_string(SelectionMetric s) { return s == SelectionMetric::task ? "task" : "loss"; }

inline OptimizerKind optimizer_kind_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "sgd") return OptimizerKind::sgd;
    throw ConfigError("unknown optimizer '" + s + "'");
}

inline SelectionMetric selection_metric_from_string(const std::string& s) {
    if (s == "task") return SelectionMetric::task;
    if (s == "loss") return SelectionMetric::loss;
    throw ConfigError("unknown selection metric '" + s + "'");
}

struct TrainConfig {
    std::size_t epochs = 1000;
    double learning_rate = 1e-3;
    /// Batch size is n / batch_divisor (at least 1) unless batch_size is set.
    std::size_t batch_divisor = 100;
    std::optional<std::size_t> batch_size;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::uint64_t seed = 0;
    /// task: validation R^2 (regression) or AUROC (classification);
    /// loss: validation loss.
    SelectionMetric selection = SelectionMetric::task;
    /// false trains only the affine head.
    bool train_bank = true;
    bool shuffle = true;

    void validate() const {
        if (epochs == 0) throw ConfigError("train: epochs must be positive");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw ConfigError("train: learning rate must be positive");
        }
        if (batch_divisor == 0) throw ConfigError("train: batch divisor must be positive");
        if (batch_size && *batch_size == 0) throw ConfigError("train: batch size must be positive");
    }

    std::size_t batch_size_for(std::size_t n) const {
        if (batch_size) return std::min(*batch_size, std::max<std::size_t>(n, 1));
        return std::max<std::size_t>(1, n / batch_divisor);
    }
};

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

class Optimizer {
public:
    virtual ~Optimizer() = default;
    /// Applies one update from the gradients currently held by `params`.
    virtual void step(std::vector<Tensor>& params) = 0;
};

class SgdOptimizer final : public Optimizer {
public:
    explicit SgdOptimizer(double lr) : lr_(lr) {}
    void step(std::vector<Tensor>& params) override {
        for (auto& p : params) {
            auto v = p.mutable_values();
            const auto g = p.grad();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr_ * g[i];
        }
    }

private:
    double lr_;
};

class AdamOptimizer final : public Optimizer {
public:
    explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::vector<Tensor>& params) override {
        if (m_.empty()) {
            for (const auto& p : params) {
                m_.emplace_back(p.size(), 0.0);
                v_.emplace_back(p.size(), 0.0);
            }
        }
        if (m_.size() != params.size()) throw StateError("adam: parameter list changed between steps");
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t j = 0; j < params.size(); ++j) {
            auto val = params[j].mutable_values();
            const auto g = params[j].grad();
            auto& m = m_[j];
            auto& v = v_[j];
            for (std::size_t i = 0; i < val.size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                val[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
            }
        }
    }

private:
    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

inline std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& cfg) {
    if (cfg.optimizer == OptimizerKind::adam) return std::make_unique<AdamOptimizer>(cfg.learning_rate);
    return std::make_unique<SgdOptimizer>(cfg.learning_rate);
}

// ---------------------------------------------------------------------------
// Evaluation helpers
// ---------------------------------------------------------------------------

/// Mean training loss of predictions (raw outputs, logits for classification).
inline double task_loss(Task task, std::span<const double> y, std::span<const double> out) {
    return task == Task::regression ? mean_squared_error(y, out) : log_loss_from_logits(y, out);
}

/// R^2 for regression, AUROC for classification; nullopt when undefined.
inline std::optional<double> task_score(Task task, std::span<const double> y, std::span<const double> out) {
    if (y.size() < 2) return std::nullopt;
    return task == Task::regression ? r_squared(y, out) : auroc(y, out);
}

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double valid_loss = 0.0;
    std::optional<double> valid_score;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_selection = 0.0;
};

inline void write_history_csv(const TrainHistory& h, std::ostream& os) {
    os << "epoch,train_loss,valid_loss,valid_score,best\n";
    for (const auto& e : h.epochs) {
        os << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.valid_loss) << ','
           << (e.valid_score ? format_double(*e.valid_score) : std::string()) << ','
           << (e.epoch == h.best_epoch ? 1 : 0) << '\n';
    }
}

/// Called after each epoch; return false to stop early.
using EpochCallback = std::function<bool(const EpochRecord&)>;

namespace detail {

inline std::string parameter_norms(const std::vector<Tensor>& params) {
    std::ostringstream os;
    double total = 0.0, max_abs = 0.0;
    bool finite = true;
    for (const auto& p : params) {
        for (double v : p.values()) {
            if (!std::isfinite(v)) finite = false;
            total += v * v;
            max_abs = std::max(max_abs, std::abs(v));
        }
    }
    os << "parameter L2 norm " << std::sqrt(total) << ", max |value| " << max_abs
       << (finite ? "" : ", non-finite parameters present");
    return os.str();
}

inline Tensor batch_rows(const Matrix& x, std::span<const std::size_t> idx) {
    std::vector<double> v(idx.size() * x.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>(idx[i] * x.cols), x.cols,
                    v.begin() + static_cast<std::ptrdiff_t>(i * x.cols));
    }
    return Tensor::from_values(idx.size(), x.cols, std::move(v));
}

}  // namespace detail

/// Trains `model` in place on the bundle's training partition and leaves it
/// holding the parameters of the epoch with the best validation selection
/// score (ties keep the earlier epoch).
inline TrainHistory train(HonamModel& model, const DatasetBundle& bundle, const TrainConfig& cfg,
                          const EpochCallback& on_epoch = {}) {
    cfg.validate();
    const std::size_t n = bundle.train_x.rows;
    if (n == 0) throw ContractError("train: empty training partition");
    if (bundle.train_y.size() != n) throw DimensionError("train: target count differs from row count");
    if (bundle.train_x.cols != model.m()) {
        throw ContractError("train: model expects " + std::to_string(model.m()) + " features, data has " +
                            std::to_string(bundle.train_x.cols));
    }
    if (bundle.valid_x.rows == 0) throw ContractError("train: empty validation partition");
    if (model.task() == Task::binary_classification) {
        for (double y : bundle.train_y) {
            if (y != 0.0 && y != 1.0) throw ContractError("train: classification targets must be 0 or 1");
        }
    }

    std::vector<Tensor> params = cfg.train_bank ? model.parameters() : model.head_parameters();
    auto opt = make_optimizer(cfg);
    Rng rng(cfg.seed);
    const std::size_t batch = cfg.batch_size_for(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    HonamModel best = model.clone();
    bool have_best = false;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < n; begin += batch, ++batch_index) {
            const std::size_t end = std::min(n, begin + batch);
            const std::span<const std::size_t> idx(order.data() + begin, end - begin);
            const Tensor x = detail::batch_rows(bundle.train_x, idx);
            std::vector<double> yv(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) yv[i] = bundle.train_y[idx[i]];
            const Tensor y = Tensor::from_values(idx.size(), 1, std::move(yv));

            for (auto& p : params) p.zero_grad();
            const Tensor out = model.forward(x);
            const Tensor loss = model.task() == Task::regression ? mse_loss(out, y) : logistic_loss(out, y);
            const double lv = loss.item();
            if (!std::isfinite(lv)) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_index) + "; " + detail::parameter_norms(params));
            }
            backward(loss);
            opt->step(params);
            loss_sum += lv * static_cast<double>(idx.size());
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n);
        const auto valid_out = model.predict(bundle.valid_x);
        rec.valid_loss = task_loss(model.task(), bundle.valid_y, valid_out);
        if (!std::isfinite(rec.valid_loss)) {
            throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch) + "; " +
                               detail::parameter_norms(params));
        }
        rec.valid_score = task_score(model.task(), bundle.valid_y, valid_out);

        const double selection = (cfg.selection == SelectionMetric::task && rec.valid_score)
                                     ? *rec.valid_score
                                     : -rec.valid_loss;
        if (!have_best || selection > history.best_selection) {
            have_best = true;
            history.best_selection = selection;
            history.best_epoch = epoch;
            best.assign_values(model);
        }
        history.epochs.push_back(rec);
        if (on_epoch && !on_epoch(rec)) break;
    }
    model.assign_values(best);
    return history;
}

// ---------------------------------------------------------------------------
// JSON run configuration
// ---------------------------------------------------------------------------

/// Architecture and optimisation settings read from a JSON file:
///
///   {"model": {"order": 2, "unit": "exu", "hidden": [32, 64, 32], "k": 32,
///              "hidden_activation": "leaky_relu", "hidden_activation_param": 0.01,
///              "unit_activation": "relu_n", "unit_activation_param": 1.0,
///              "trainable_shift": true, "unit_in_all_layers": false,
///              "activate_output": false},
///    "train": {"epochs": 1000, "learning_rate": 0.001, "batch_divisor": 100,
///              "batch_size": 64, "optimizer": "adam", "selection": "task",
///              "train_bank": true}}
///
/// Every key is optional; unknown keys are rejected.
struct RunConfig {
    std::size_t order = 2;
    FeatureNetConfig net;
    TrainConfig train;

    void validate() const {
        if (order == 0) throw ConfigError("config: order must be at least 1");
        net.validate();
        train.validate();
    }

    ModelConfig model_config(std::size_t m, Task task) const {
        ModelConfig c;
        c.m = m;
        c.order = order;
        c.task = task;
        c.net = net;
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json model{{"order", order},
                             {"unit", to_string(net.unit)},
                             {"hidden", net.hidden},
                             {"k", net.k},
                             {"hidden_activation", to_string(net.hidden_act.kind)},
                             {"hidden_activation_param", net.hidden_act.param},
                             {"unit_activation", to_string(net.unit_act.kind)},
                             {"unit_activation_param", net.unit_act.param},
                             {"trainable_shift", net.trainable_shift},
                             {"unit_in_all_layers", net.unit_in_all_layers},
                             {"activate_output", net.activate_output}};
        nlohmann::json tr{{"epochs", train.epochs},
                          {"learning_rate", train.learning_rate},
                          {"batch_divisor", train.batch_divisor},
                          {"optimizer", to_string(train.optimizer)},
                          {"selection", to_string(train.selection)},
                          {"train_bank", train.train_bank}};
        if (train.batch_size) tr["batch_size"] = *train.batch_size;
        return {{"model", model}, {"train", tr}};
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        if (!j.is_object()) throw ConfigError("config: top level must be an object");
        for (const auto& [key, _] : j.items()) {
            if (key != "model" && key != "train") throw ConfigError("config: unknown key '" + key + "'");
        }
        try {
            if (j.contains("model")) {
                const auto& m = j.at("model");
                for (const auto& [key, v] : m.items()) {
                    if (key == "order") c.order = positive_int(v, "model.order");
                    else if (key == "unit") c.net.unit = unit_kind_from_string(v.get<std::string>());
                    else if (key == "hidden") {
                        c.net.hidden.clear();
                        for (const auto& h : v) c.net.hidden.push_back(positive_int(h, "model.hidden"));
                    } else if (key == "k") c.net.k = positive_int(v, "model.k");
                    else if (key == "hidden_activation")
                        c.net.hidden_act.kind = activation_kind_from_string(v.get<std::string>());
                    else if (key == "hidden_activation_param") c.net.hidden_act.param = v.get<double>();
                    else if (key == "unit_activation")
                        c.net.unit_act.kind = activation_kind_from_string(v.get<std::string>());
                    else if (key == "unit_activation_param") c.net.unit_act.param = v.get<double>();
                    else if (key == "trainable_shift") c.net.trainable_shift = v.get<bool>();
                    else if (key == "unit_in_all_layers") c.net.unit_in_all_layers = v.get<bool>();
                    else if (key == "activate_output") c.net.activate_output = v.get<bool>();
                    else throw ConfigError("config: unknown key 'model." + key + "'");
                }
            }
            if (j.contains("train")) {
                const auto& t = j.at("train");
                for (const auto& [key, v] : t.items()) {
                    if (key == "epochs") c.train.epochs = positive_int(v, "train.epochs");
                    else if (key == "learning_rate") c.train.learning_rate = v.get<double>();
                    else if (key == "batch_divisor") c.train.batch_divisor = positive_int(v, "train.batch_divisor");
                    else if (key == "batch_size") {
                        if (!v.is_null()) c.train.batch_size = positive_int(v, "train.batch_size");
                    } else if (key == "optimizer") c.train.optimizer = optimizer_kind_from_string(v.get<std::string>());
                    else if (key == "selection") c.train.selection = selection_metric_from_string(v.get<std::string>());
                    else if (key == "train_bank") c.train.train_bank = v.get<bool>();
                    else throw ConfigError("config: unknown key 'train." + key + "'");
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        c.validate();
        return c;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config '" + path + "': " + e.what());
        }
        return from_json(j);
    }

private:
    static std::size_t positive_int(const nlohmann::json& v, const char* name) {
        if (!v.is_number_integer() || v.get<long long>() <= 0) {
            throw ConfigError(std::string("config: ") + name + " must be a positive integer");
        }
        return v.get<std::size_t>();
    }
};

}  // namespace honam
