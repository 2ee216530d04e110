#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/core/stats.hpp"

namespace gbmos {

/// Dense row-major design matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    static Matrix from_table(const FeatureTable& t) {
        Matrix m(t.rows(), t.cols());
        m.data = t.values;
        return m;
    }

    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix m(idx.size(), cols);
        for (std::size_t r = 0; r < idx.size(); ++r) std::copy_n(data.begin() + idx[r] * cols, cols, m.data.begin() + r * cols);
        return m;
    }

    Matrix select_cols(const std::vector<std::size_t>& idx) const {
        Matrix m(rows, idx.size());
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < idx.size(); ++c) m(r, c) = (*this)(r, idx[c]);
        return m;
    }
};

inline void check_training_data(const Matrix& x, std::span<const double> y, std::size_t min_rows = 1) {
    if (x.rows != y.size()) throw ParameterError("feature rows and targets differ in length");
    if (x.rows < min_rows) throw DataError("need at least " + std::to_string(min_rows) + " training rows");
    if (x.cols == 0) throw DataError("no features");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("targets must be finite");
    for (double v : x.data)
        if (!std::isfinite(v)) throw DataError("features must be finite after imputation");
}

/// Per-column training medians; columns without any observed value get 0.
inline std::vector<double> imputation_medians(const Matrix& x) {
    std::vector<double> med(x.cols, 0.0);
    std::vector<double> col;
    for (std::size_t c = 0; c < x.cols; ++c) {
        col.clear();
        for (std::size_t r = 0; r < x.rows; ++r)
            if (!std::isnan(x(r, c))) col.push_back(x(r, c));
        if (!col.empty()) med[c] = stats::median(col);
    }
    return med;
}

inline Matrix impute(Matrix x, const std::vector<double>& med) {
    if (med.size() != x.cols) throw ParameterError("imputation vector width differs from feature count");
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c)
            if (std::isnan(x(r, c))) x(r, c) = med[c];
    return x;
}

} // namespace gbmos
