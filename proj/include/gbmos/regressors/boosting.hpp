#pragma once

// Least-squares gradient boosting: stage k fits a regression tree to the
// residuals y - F_{k-1}, and F_m(x) = init + learning_rate * sum_{k<=m} tree_k(x)
// with the sum accumulated in stage order.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/regressors/tree.hpp"

namespace gbmos {

struct BoostParams {
    std::size_t n_estimators = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    double subsample = 1.0; // rows per stage, drawn without replacement
};

struct BoostModel {
    BoostParams params;
    std::uint64_t seed = 0;
    double init = 0;
    std::vector<RegressionTree> trees;

    /// Prediction using the first `stages` trees.
    double predict_staged(std::span<const double> x, std::size_t stages) const {
        if (stages > trees.size()) throw ParameterError("stage count exceeds the number of trees");
        double s = 0;
        for (std::size_t k = 0; k < stages; ++k) s += trees[k].predict_row(x);
        return init + params.learning_rate * s;
    }

    double predict_row(std::span<const double> x) const { return predict_staged(x, trees.size()); }

    std::vector<double> importance() const {
        std::vector<double> out;
        for (const auto& t : trees) {
            if (out.empty()) out.assign(t.sse_decrease.size(), 0.0);
            for (std::size_t f = 0; f < out.size(); ++f) out[f] += t.sse_decrease[f];
        }
        double total = 0;
        for (double v : out) total += v;
        if (total > 0)
            for (double& v : out) v /= total;
        return out;
    }
};

inline BoostModel train_gbr(const Matrix& x, std::span<const double> y, const BoostParams& params, std::uint64_t seed) {
    check_training_data(x, y, 2);
    if (!(params.learning_rate > 0 && params.learning_rate <= 1)) throw ParameterError("learning_rate must lie in (0, 1]");
    if (!(params.subsample > 0 && params.subsample <= 1)) throw ParameterError("subsample must lie in (0, 1]");
    const TreeParams tp{params.max_depth, params.min_samples_split, params.min_samples_leaf, 0};
    validate(tp);
    const std::size_t n = x.rows;
    BoostModel m;
    m.params = params;
    m.seed = seed;
    double s = 0;
    for (double v : y) s += v;
    m.init = s / static_cast<double>(n);

    std::vector<double> tree_sum(n, 0.0), resid(n);
    const auto n_sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));
    for (std::size_t k = 0; k < params.n_estimators; ++k) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - (m.init + params.learning_rate * tree_sum[i]);
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        if (n_sub < n) {
            Rng rng(derive_seed(seed, k));
            for (std::size_t i = 0; i < n_sub; ++i) std::swap(rows[i], rows[i + rng.index(n - i)]);
            rows.resize(n_sub);
            std::sort(rows.begin(), rows.end());
        }
        m.trees.push_back(fit_tree(x, resid, std::move(rows), tp));
        for (std::size_t i = 0; i < n; ++i) tree_sum[i] += m.trees.back().predict_row(x.row(i));
    }
    return m;
}

} // namespace gbmos
