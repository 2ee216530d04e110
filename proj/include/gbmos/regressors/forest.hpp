#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/regressors/tree.hpp"

namespace gbmos {

struct ForestParams {
    std::size_t n_trees = 100;
    int max_depth = -1;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0; // 0 = ceil(p / 3)
    bool bootstrap = true;
};

inline std::size_t resolved_max_features(const ForestParams& p, std::size_t n_features) {
    if (p.max_features > 0) return std::min(p.max_features, n_features);
    return std::max<std::size_t>(1, (n_features + 2) / 3);
}

struct ForestModel {
    ForestParams params;
    std::size_t max_features = 0; // resolved
    std::uint64_t seed = 0;
    std::vector<RegressionTree> trees;

    /// Mean of tree predictions, summed in tree order.
    double predict_row(std::span<const double> x) const {
        double s = 0;
        for (const auto& t : trees) s += t.predict_row(x);
        return s / static_cast<double>(trees.size());
    }

    std::vector<double> importance() const {
        std::vector<double> out;
        for (const auto& t : trees) {
            const auto imp = t.importance();
            if (out.empty()) out.assign(imp.size(), 0.0);
            for (std::size_t f = 0; f < imp.size(); ++f) out[f] += imp[f];
        }
        double total = 0;
        for (double v : out) total += v;
        if (total > 0)
            for (double& v : out) v /= total;
        return out;
    }
};

/// Tree t draws its bootstrap sample and feature subsets from
/// derive_seed(seed, t), so the result does not depend on scheduling.
inline ForestModel train_forest(const Matrix& x, std::span<const double> y, const ForestParams& params, std::uint64_t seed) {
    check_training_data(x, y, 2);
    if (params.n_trees < 1) throw ParameterError("n_trees must be at least 1");
    ForestModel m;
    m.params = params;
    m.seed = seed;
    m.max_features = resolved_max_features(params, x.cols);
    const TreeParams tp{params.max_depth, params.min_samples_split, params.min_samples_leaf, m.max_features};
    validate(tp);
    m.trees.resize(params.n_trees);
    parallel_for(params.n_trees, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> rows(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) rows[i] = params.bootstrap ? rng.index(x.rows) : i;
        m.trees[t] = fit_tree(x, y, std::move(rows), tp, &rng);
    });
    return m;
}

} // namespace gbmos
