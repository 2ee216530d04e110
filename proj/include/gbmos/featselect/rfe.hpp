#pragma once

// Recursive feature elimination. Each iteration fits the estimator on the
// surviving features and drops the min(step, remaining - n_keep) least
// important ones; equal importances drop the lexicographically later name
// first. Ranks: kept features get 1..n_keep in name order, then eliminated
// features in reverse elimination order (the last one dropped is n_keep + 1).

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/regressors/model.hpp"

namespace gbmos {

struct EstimatorSpec {
    PredictorKind kind = PredictorKind::Forest;
    json params = json::object();

    json to_json() const { return {{"predictor", gbmos::to_string(kind)}, {"params", resolve_params(kind, params)}}; }
};

/// Per-feature importance of a fitted model, in its feature order.
inline std::vector<double> importance(const TrainedModel& model) { return model.importance(); }

struct Elimination {
    std::string feature;
    int iteration = 0; // 1-based
    double importance = 0;
};

struct FeatureRanking {
    std::vector<std::string> features; // input order
    std::vector<int> rank;              // parallel to features
    std::vector<std::string> kept;      // input order
    std::vector<Elimination> trace;     // elimination order
    EstimatorSpec estimator;
    std::size_t step = 1;
    std::uint64_t seed = 0;

    int eliminated_at(const std::string& name) const {
        for (const auto& e : trace)
            if (e.feature == name) return e.iteration;
        return 0;
    }

    csv::Table to_table() const {
        csv::Table t;
        t.header = {"feature", "rank", "kept", "eliminated_at_iteration"};
        std::vector<std::size_t> order(features.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
        for (auto i : order) {
            const int it = eliminated_at(features[i]);
            t.rows.push_back({features[i], std::to_string(rank[i]), it == 0 ? "1" : "0", it == 0 ? "" : std::to_string(it)});
        }
        return t;
    }

    void write_csv(const std::string& path) const { csv::write(path, to_table()); }
};

inline FeatureRanking rfe(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                          const EstimatorSpec& est, std::size_t n_keep, std::size_t step, std::uint64_t seed) {
    const std::size_t p = x.cols;
    if (names.size() != p) throw ParameterError("feature names do not match the matrix width");
    if (step < 1) throw ParameterError("rfe step must be at least 1");
    if (n_keep < 1 || n_keep > p) throw ParameterError("n_keep must lie in [1, " + std::to_string(p) + "]");
    if (est.kind == PredictorKind::Mlp) throw ParameterError("importance undefined for this predictor");
    {
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ParameterError("duplicate feature names");
    }

    FeatureRanking out;
    out.features = names;
    out.estimator = est;
    out.step = step;
    out.seed = seed;
    std::vector<std::size_t> alive(p);
    std::iota(alive.begin(), alive.end(), 0);
    int iteration = 0;
    while (alive.size() > n_keep) {
        ++iteration;
        std::vector<std::string> sub_names;
        for (auto c : alive) sub_names.push_back(names[c]);
        std::vector<double> imp;
        try {
            imp = train_model(est.kind, est.params, x.select_cols(alive), y, sub_names, seed).importance();
        } catch (const Error& e) {
            throw DataError("rfe iteration " + std::to_string(iteration) + ": " + e.what());
        }
        std::vector<std::size_t> order(alive.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (imp[a] != imp[b]) return imp[a] < imp[b];
            return sub_names[a] > sub_names[b];
        });
        const std::size_t drop = std::min(step, alive.size() - n_keep);
        std::vector<bool> dropped(alive.size(), false);
        for (std::size_t d = 0; d < drop; ++d) {
            dropped[order[d]] = true;
            out.trace.push_back({sub_names[order[d]], iteration, imp[order[d]]});
        }
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (!dropped[i]) next.push_back(alive[i]);
        alive = std::move(next);
    }

    out.rank.assign(p, 0);
    std::vector<std::size_t> kept_sorted = alive;
    std::sort(kept_sorted.begin(), kept_sorted.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    int r = 1;
    for (auto c : kept_sorted) out.rank[c] = r++;
    for (auto it = out.trace.rbegin(); it != out.trace.rend(); ++it) {
        const auto c = static_cast<std::size_t>(std::find(names.begin(), names.end(), it->feature) - names.begin());
        out.rank[c] = r++;
    }
    for (auto c : alive) out.kept.push_back(names[c]);
    return out;
}

inline FeatureRanking rfe(const FeatureTable& table, std::span<const double> y, const EstimatorSpec& est, std::size_t n_keep,
                          std::size_t step, std::uint64_t seed) {
    return rfe(Matrix::from_table(table), y, table.names, est, n_keep, step, seed);
}

} // namespace gbmos
