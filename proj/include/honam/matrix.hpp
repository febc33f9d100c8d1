#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "honam/errors.hpp"
#include "honam/tensor.hpp"

namespace honam {

/// Plain row-major value matrix for datasets (no gradient bookkeeping).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= rows) throw DimensionError("select_rows: index out of range");
            for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(idx[i], j);
        }
        return out;
    }

    Tensor to_tensor() const { return Tensor::from_values(rows, cols, data); }
};

inline Tensor column_tensor(std::span<const double> v) {
    return Tensor::from_values(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

}  // namespace honam
