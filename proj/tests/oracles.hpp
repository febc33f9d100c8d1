#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library code they are compared against.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Naive row-major triple loop.
inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n,
                                  std::size_t p, std::size_t q) {
    std::vector<double> c(n * q, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < p; ++l) s += a[i * p + l] * b[l * q + j];
            c[i * q + j] = s;
        }
    }
    return c;
}

/// Element-wise sum over all t-subsets, walked by bitmask.
inline std::vector<double> subset_product_sum(const std::vector<std::vector<double>>& r, std::size_t t) {
    const std::size_t m = r.size(), k = r.front().size();
    std::vector<double> acc(k, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != t) continue;
        for (std::size_t d = 0; d < k; ++d) {
            double p = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1u << i)) p *= r[i][d];
            }
            acc[d] += p;
        }
    }
    return acc;
}

/// Fraction of (positive, negative) pairs ranked correctly, ties count 1/2.
inline double all_pairs_auroc(const std::vector<double>& labels, const std::vector<double>& scores) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0.5) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] > 0.5) continue;
            den += 1.0;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / den;
}

/// Average precision from its definition: mean over positives of the
/// precision at that positive's score threshold (ties share a threshold).
inline double average_precision(const std::vector<double>& labels, const std::vector<double>& scores) {
    double total = 0.0, npos = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0.5) continue;
        npos += 1.0;
        double tp = 0.0, all = 0.0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (scores[j] >= scores[i]) {
                all += 1.0;
                if (labels[j] > 0.5) tp += 1.0;
            }
        }
        total += tp / all;
    }
    return total / npos;
}

/// Central-difference derivative of a scalar function.
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle
