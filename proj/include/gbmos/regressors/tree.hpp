#pragma once

// CART regression tree with variance-reduction splits.
//
// Split search scans each candidate feature in sorted order and scores a
// cut by the SSE decrease sum_L(d)^2/n_L + sum_R(d)^2/n_R, where d are the
// node's targets centered on the node mean. Only the order of a column
// matters, so any strictly increasing transform of a column gives the same
// partitions. A cut after value a is placed at the midpoint between a and the
// next distinct value of that column in the whole training matrix (not just
// the node or bootstrap sample), so every training row, sampled or not, is
// routed by rank alone. A row goes left iff x <= threshold. Equal gains keep
// the lowest feature index, then the lowest threshold.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/regressors/dataset.hpp"

namespace gbmos {

struct TreeParams {
    int max_depth = -1; // -1 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0; // 0 = all
};

inline void validate(const TreeParams& p) {
    if (p.max_depth < -1) throw ParameterError("max_depth must be -1 (unlimited) or non-negative");
    if (p.min_samples_split < 2) throw ParameterError("min_samples_split must be at least 2");
    if (p.min_samples_leaf < 1) throw ParameterError("min_samples_leaf must be at least 1");
}

struct TreeNode {
    int feature = -1; // -1 = leaf
    double threshold = 0;
    int left = -1, right = -1;
    double value = 0; // mean target of the training rows reaching the node
    std::size_t n = 0;
    bool leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::vector<double> sse_decrease; // per feature, unnormalized

    std::size_t leaf_of(std::span<const double> x) const {
        std::size_t i = 0;
        while (!nodes[i].leaf()) {
            const auto& nd = nodes[i];
            i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
        }
        return i;
    }

    double predict_row(std::span<const double> x) const { return nodes[leaf_of(x)].value; }

    int depth() const {
        std::vector<int> d(nodes.size(), 0);
        int best = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            best = std::max(best, d[i]);
            if (!nodes[i].leaf()) {
                d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
                d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
            }
        }
        return best;
    }

    /// SSE decrease per feature normalized to sum 1 (all zero for a stump-free tree).
    std::vector<double> importance() const {
        std::vector<double> out = sse_decrease;
        double total = 0;
        for (double v : out) total += v;
        if (total > 0)
            for (double& v : out) v /= total;
        return out;
    }
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0;
    double gain = 0;
};

namespace detail {

/// Best split of `rows` over the given features (ascending order).
inline std::vector<std::vector<double>> distinct_column_values(const Matrix& x) {
    std::vector<std::vector<double>> out(x.cols);
    for (std::size_t c = 0; c < x.cols; ++c) {
        auto& v = out[c];
        v.reserve(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) v.push_back(x(r, c));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

inline SplitChoice best_split(const Matrix& x, std::span<const double> y, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& features, std::size_t min_leaf,
                              const std::vector<std::vector<double>>& column_values) {
    const std::size_t n = rows.size();
    double mean = 0;
    for (auto r : rows) mean += y[r];
    mean /= static_cast<double>(n);
    SplitChoice best;
    std::vector<std::size_t> order(rows);
    for (auto f : features) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
        double total = 0;
        for (auto r : order) total += y[r] - mean;
        double left = 0;
        for (std::size_t i = 1; i < n; ++i) {
            left += y[order[i - 1]] - mean;
            const double a = x(order[i - 1], f), b = x(order[i], f);
            if (!(a < b) || i < min_leaf || n - i < min_leaf) continue;
            const double right = total - left;
            const double gain = left * left / static_cast<double>(i) + right * right / static_cast<double>(n - i);
            if (gain > best.gain) {
                const auto& vals = column_values[f];
                const double next = *std::upper_bound(vals.begin(), vals.end(), a);
                double t = 0.5 * (a + next);
                if (!(t < next)) t = a;
                best = {static_cast<int>(f), t, gain};
            }
        }
    }
    return best;
}

} // namespace detail

/// Fits a tree on `rows` (duplicates allowed, e.g. a bootstrap sample).
/// `rng` is only used when max_features restricts the candidate features.
inline RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                               const TreeParams& params, Rng* rng = nullptr) {
    validate(params);
    if (rows.empty()) throw DataError("tree needs at least one training row");
    const std::size_t p = x.cols;
    const bool sample_features = params.max_features > 0 && params.max_features < p;
    if (sample_features && !rng) throw ParameterError("feature subsampling needs a random source");

    RegressionTree tree;
    tree.sse_decrease.assign(p, 0.0);
    struct Pending {
        std::size_t node;
        std::vector<std::size_t> rows;
        int depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(rows), 0});
    const auto column_values = detail::distinct_column_values(x);
    std::vector<std::size_t> all(p);
    for (std::size_t f = 0; f < p; ++f) all[f] = f;

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        const auto& rs = job.rows;
        TreeNode& node = tree.nodes[job.node];
        node.n = rs.size();
        bool pure = true;
        double sum = 0;
        for (auto r : rs) {
            sum += y[r];
            pure = pure && y[r] == y[rs[0]];
        }
        node.value = pure ? y[rs[0]] : sum / static_cast<double>(rs.size());
        if (pure || rs.size() < params.min_samples_split || (params.max_depth >= 0 && job.depth >= params.max_depth)) continue;

        SplitChoice split;
        if (sample_features) {
            std::vector<std::size_t> perm = all;
            for (std::size_t i = 0; i < params.max_features; ++i) std::swap(perm[i], perm[i + rng->index(p - i)]);
            std::vector<std::size_t> chosen(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(params.max_features));
            std::vector<std::size_t> rest(perm.begin() + static_cast<std::ptrdiff_t>(params.max_features), perm.end());
            std::sort(chosen.begin(), chosen.end());
            std::sort(rest.begin(), rest.end());
            split = detail::best_split(x, y, rs, chosen, params.min_samples_leaf, column_values);
            if (split.feature < 0) split = detail::best_split(x, y, rs, rest, params.min_samples_leaf, column_values);
        } else {
            split = detail::best_split(x, y, rs, all, params.min_samples_leaf, column_values);
        }
        if (split.feature < 0) continue;

        std::vector<std::size_t> left, right;
        for (auto r : rs) (x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
        tree.sse_decrease[static_cast<std::size_t>(split.feature)] += split.gain;
        const auto li = tree.nodes.size();
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[job.node]; // re-fetch after growth
        parent.feature = split.feature;
        parent.threshold = split.threshold;
        parent.left = static_cast<int>(li);
        parent.right = static_cast<int>(li + 1);
        stack.push_back({li + 1, std::move(right), job.depth + 1});
        stack.push_back({li, std::move(left), job.depth + 1});
    }
    return tree;
}

inline RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params = {}) {
    std::vector<std::size_t> rows(x.rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return fit_tree(x, y, std::move(rows), params);
}

} // namespace gbmos
