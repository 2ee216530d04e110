#pragma once

// k-fold grid search. The grid is a JSON object mapping parameter names to
// arrays of values; combinations are the cartesian product in key order with
// the last key varying fastest, each laid over the base parameters.
// Folds: rows are permuted with derive_seed(seed, kFoldStream) and row at
// permuted position i goes to fold i mod k.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/regressors/model.hpp"

namespace gbmos {

inline constexpr std::uint64_t kFoldStream = 0xF01D;

inline std::vector<json> expand_grid(const json& base, const json& grid) {
    if (!grid.is_object() || grid.empty()) throw ParameterError("empty grid");
    std::vector<json> combos{base.is_null() ? json::object() : base};
    for (const auto& [key, values] : grid.items()) {
        if (!values.is_array() || values.empty()) throw ParameterError("empty grid: '" + key + "' has no values");
        std::vector<json> next;
        for (const auto& c : combos)
            for (const auto& v : values) {
                json e = c;
                e[key] = v;
                next.push_back(std::move(e));
            }
        combos = std::move(next);
    }
    return combos;
}

inline std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> perm(n), fold(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(seed, kFoldStream));
    rng.shuffle(perm);
    for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % k;
    return fold;
}

struct GridSearchReport {
    PredictorKind kind = PredictorKind::Linear;
    std::vector<json> combinations;
    std::vector<double> mean_mse, std_mse; // +inf mean when a combination failed
    std::vector<std::string> errors;       // empty when the combination trained
    std::size_t best = 0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;

    json to_json() const {
        json cells = json::array();
        for (std::size_t i = 0; i < combinations.size(); ++i) {
            json c = {{"params", combinations[i]}};
            if (std::isfinite(mean_mse[i])) {
                c["mean_mse"] = mean_mse[i];
                c["std_mse"] = std_mse[i];
            } else {
                c["error"] = errors[i];
            }
            cells.push_back(std::move(c));
        }
        return {{"predictor", gbmos::to_string(kind)}, {"folds", folds}, {"fold_seed", seed},
                {"cells", cells},                      {"best", best},   {"best_params", combinations[best]}};
    }
};

struct GridSearchResult {
    GridSearchReport report;
    TrainedModel model;
};

inline GridSearchResult grid_search_cv(PredictorKind kind, const json& base, const json& grid, const Matrix& x,
                                       std::span<const double> y, const std::vector<std::string>& features, std::size_t k,
                                       std::uint64_t seed) {
    if (k < 2) throw ParameterError("grid search needs at least 2 folds");
    if (x.rows < k) throw DataError("fewer rows than folds");
    if (x.rows != y.size()) throw ParameterError("feature rows and targets differ in length");
    GridSearchReport rep;
    rep.kind = kind;
    rep.combinations = expand_grid(base, grid);
    for (auto& c : rep.combinations) c = resolve_params(kind, c);
    rep.folds = k;
    rep.seed = seed;
    const auto fold = fold_assignment(x.rows, k, seed);
    const std::size_t m = rep.combinations.size();
    rep.mean_mse.assign(m, 0.0);
    rep.std_mse.assign(m, 0.0);
    rep.errors.assign(m, "");

    parallel_for(m, [&](std::size_t c) {
        std::vector<double> mse(k);
        try {
            for (std::size_t f = 0; f < k; ++f) {
                std::vector<std::size_t> train, test;
                for (std::size_t i = 0; i < x.rows; ++i) (fold[i] == f ? test : train).push_back(i);
                std::vector<double> ytr;
                for (auto i : train) ytr.push_back(y[i]);
                const auto model = train_model(kind, rep.combinations[c], x.select_rows(train), ytr, features, seed);
                const auto pred = model.predict(x.select_rows(test));
                double s = 0;
                for (std::size_t t = 0; t < test.size(); ++t) s += (pred[t] - y[test[t]]) * (pred[t] - y[test[t]]);
                mse[f] = s / static_cast<double>(test.size());
                if (!std::isfinite(mse[f])) throw DataError("non-finite validation error");
            }
            double mean = 0;
            for (double v : mse) mean += v;
            mean /= static_cast<double>(k);
            double var = 0;
            for (double v : mse) var += (v - mean) * (v - mean);
            rep.mean_mse[c] = mean;
            rep.std_mse[c] = std::sqrt(var / static_cast<double>(k));
        } catch (const Error& e) {
            rep.mean_mse[c] = std::numeric_limits<double>::infinity();
            rep.std_mse[c] = std::numeric_limits<double>::infinity();
            rep.errors[c] = e.what();
        }
    });

    rep.best = 0;
    for (std::size_t c = 1; c < m; ++c)
        if (rep.mean_mse[c] < rep.mean_mse[rep.best]) rep.best = c;
    if (!std::isfinite(rep.mean_mse[rep.best])) throw DataError("every grid combination failed; first error: " + rep.errors[0]);
    auto model = train_model(kind, rep.combinations[rep.best], x, y, features, seed);
    return {std::move(rep), std::move(model)};
}

} // namespace gbmos
