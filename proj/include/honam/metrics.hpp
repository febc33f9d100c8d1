#pragma once

// Evaluation metrics. Scores that are undefined for the given input (constant
// targets, a single class, empty groups) come back as std::nullopt.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "honam/errors.hpp"

namespace honam {

namespace detail {

inline void check_pair(std::span<const double> y, std::span<const double> yhat, const char* name) {
    if (y.size() != yhat.size()) {
        throw DimensionError(std::string(name) + ": " + std::to_string(y.size()) + " targets vs " +
                             std::to_string(yhat.size()) + " predictions");
    }
    if (y.size() < 2) throw ContractError(std::string(name) + ": need at least 2 samples");
}

inline double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::optional<double> adjust(std::optional<double> score, std::size_t n, std::size_t p) {
    if (!score) return std::nullopt;
    if (n <= p + 1) throw ContractError("adjusted score: need n > p + 1");
    return 1.0 - (1.0 - *score) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

}  // namespace detail

/// 1 - SS_res / SS_tot.
inline std::optional<double> r_squared(std::span<const double> y, std::span<const double> yhat) {
    detail::check_pair(y, yhat, "r_squared");
    const double mu = detail::mean(y);
    double res = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        tot += (y[i] - mu) * (y[i] - mu);
    }
    if (tot == 0.0) return std::nullopt;
    return 1.0 - res / tot;
}

inline std::optional<double> adjusted_r_squared(std::span<const double> y, std::span<const double> yhat,
                                                std::size_t p) {
    return detail::adjust(r_squared(y, yhat), y.size(), p);
}

/// 1 - sum|y - yhat| / sum|y - mean(y)|; higher is better, like R^2.
inline std::optional<double> r_absolute(std::span<const double> y, std::span<const double> yhat) {
    detail::check_pair(y, yhat, "r_absolute");
    const double mu = detail::mean(y);
    double res = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        res += std::abs(y[i] - yhat[i]);
        tot += std::abs(y[i] - mu);
    }
    if (tot == 0.0) return std::nullopt;
    return 1.0 - res / tot;
}

inline std::optional<double> adjusted_r_absolute(std::span<const double> y, std::span<const double> yhat,
                                                 std::size_t p) {
    return detail::adjust(r_absolute(y, yhat), y.size(), p);
}

/// Area under the ROC curve via average ranks (ties contribute 1/2).
inline std::optional<double> auroc(std::span<const double> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw DimensionError("auroc: size mismatch");
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Twice the rank sum keeps every quantity an exact integer.
    double twice_rank_sum = 0.0;
    double pos = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double twice_avg_rank = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
        for (std::size_t r = i; r < j; ++r) {
            if (labels[order[r]] > 0.5) {
                twice_rank_sum += twice_avg_rank;
                pos += 1.0;
            }
        }
        i = j;
    }
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0.0 || neg == 0.0) return std::nullopt;
    const double twice_u = twice_rank_sum - pos * (pos + 1.0);
    return twice_u / (2.0 * pos * neg);
}

/// Average precision: sum over distinct thresholds (descending) of
/// precision * recall increment.
inline std::optional<double> auprc(std::span<const double> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw DimensionError("auprc: size mismatch");
    const std::size_t n = labels.size();
    double total_pos = 0.0;
    for (double l : labels) total_pos += l > 0.5 ? 1.0 : 0.0;
    if (total_pos == 0.0) return std::nullopt;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double tp = 0.0, fp = 0.0, prev_recall = 0.0, ap = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] > 0.5) {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            ++j;
        }
        const double recall = tp / total_pos;
        ap += (recall - prev_recall) * (tp / (tp + fp));
        prev_recall = recall;
        i = j;
    }
    return ap;
}

/// Mean logistic loss of logits.
inline double log_loss_from_logits(std::span<const double> labels, std::span<const double> logits) {
    if (labels.size() != logits.size() || labels.empty()) throw DimensionError("log_loss: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double z = logits[i];
        total += std::max(z, 0.0) - labels[i] * z + std::log1p(std::exp(-std::abs(z)));
    }
    return total / static_cast<double>(labels.size());
}

inline double mean_squared_error(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty()) throw DimensionError("mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Share of `group` members whose predicted class (probability >= threshold
/// means class 1) equals `favorable_class`; nullopt for an empty group.
inline std::optional<double> favorable_rate(std::span<const double> probabilities,
                                            std::span<const std::string> groups, const std::string& group,
                                            double threshold = 0.5, int favorable_class = 0) {
    if (probabilities.size() != groups.size()) throw DimensionError("favorable_rate: size mismatch");
    double members = 0.0, favorable = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i] != group) continue;
        members += 1.0;
        const int cls = probabilities[i] >= threshold ? 1 : 0;
        if (cls == favorable_class) favorable += 1.0;
    }
    if (members == 0.0) return std::nullopt;
    return favorable / members;
}

/// min(r_a / r_b, r_b / r_a) of the two groups' favourable rates; 1 is
/// parity. nullopt when a group is empty or neither group has a favourable
/// prediction.
inline std::optional<double> disparate_impact_from_rates(std::optional<double> ra, std::optional<double> rb) {
    if (!ra || !rb) return std::nullopt;
    if (*ra == 0.0 && *rb == 0.0) return std::nullopt;
    if (*ra == 0.0 || *rb == 0.0) return 0.0;
    return std::min(*ra / *rb, *rb / *ra);
}

inline std::optional<double> disparate_impact(std::span<const double> probabilities,
                                              std::span<const std::string> groups, const std::string& group_a,
                                              const std::string& group_b, double threshold = 0.5,
                                              int favorable_class = 0) {
    return disparate_impact_from_rates(
        favorable_rate(probabilities, groups, group_a, threshold, favorable_class),
        favorable_rate(probabilities, groups, group_b, threshold, favorable_class));
}

/// Mean and (population) standard deviation across seeds; std only with
/// at least two values.
struct MeanStd {
    double mean = 0.0;
    std::optional<double> std;
    std::size_t count = 0;
};

inline MeanStd summarize(std::span<const double> values) {
    MeanStd s;
    s.count = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double v = 0.0;
        for (double x : values) v += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(v / static_cast<double>(values.size()));
    }
    return s;
}

}  // namespace honam
