#pragma once

// Predictor-agnostic trained model with JSON persistence.
//
// File layout (schema "gbmos.model/1"):
//   { "schema", "kind", "params", "seed", "features", "impute", "fit" }
// "params" holds every hyperparameter after defaults are applied and "fit"
// the learned parameters. Doubles are written in shortest round-trip form,
// so a loaded model predicts bit-identically.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/regressors/boosting.hpp"
#include "gbmos/regressors/dataset.hpp"
#include "gbmos/regressors/forest.hpp"
#include "gbmos/regressors/linear.hpp"
#include "gbmos/regressors/mlp.hpp"

namespace gbmos {

using json = nlohmann::json;

inline constexpr const char* kModelSchema = "gbmos.model/1";

enum class PredictorKind { Linear, Forest, Boosting, Mlp };

inline std::string to_string(PredictorKind k) {
    switch (k) {
    case PredictorKind::Linear: return "linear";
    case PredictorKind::Forest: return "rfr";
    case PredictorKind::Boosting: return "gbr";
    case PredictorKind::Mlp: return "mlp";
    }
    return "linear";
}

inline PredictorKind parse_predictor(const std::string& s) {
    if (s == "linear") return PredictorKind::Linear;
    if (s == "rfr") return PredictorKind::Forest;
    if (s == "gbr") return PredictorKind::Boosting;
    if (s == "mlp") return PredictorKind::Mlp;
    throw ParameterError("unknown predictor '" + s + "' (linear, rfr, gbr, mlp)");
}

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& known, const std::string& what) {
    if (!j.is_object()) throw ParameterError(what + " parameters must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ParameterError("unknown " + what + " parameter '" + k + "'");
}

template <typename T>
void read_param(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParameterError(std::string("parameter '") + key + "' has the wrong type");
    }
}

/// Non-negative integer parameter.
inline void read_count(const json& j, const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ParameterError(std::string("parameter '") + key + "' must be a non-negative integer");
    out = v.get<std::size_t>();
}

} // namespace detail

inline LinearParams linear_params(const json& j) {
    detail::check_keys(j, {"penalty", "lambda", "max_iter", "tol"}, "linear");
    LinearParams p;
    if (j.contains("penalty")) p.penalty = parse_penalty(j.at("penalty").get<std::string>());
    detail::read_param(j, "lambda", p.lambda);
    detail::read_param(j, "max_iter", p.max_iter);
    detail::read_param(j, "tol", p.tol);
    return p;
}

inline json to_json(const LinearParams& p) {
    return {{"penalty", to_string(p.penalty)}, {"lambda", p.lambda}, {"max_iter", p.max_iter}, {"tol", p.tol}};
}

inline ForestParams forest_params(const json& j) {
    detail::check_keys(j, {"n_trees", "max_depth", "min_samples_split", "min_samples_leaf", "max_features", "bootstrap"}, "rfr");
    ForestParams p;
    detail::read_count(j, "n_trees", p.n_trees);
    detail::read_param(j, "max_depth", p.max_depth);
    detail::read_count(j, "min_samples_split", p.min_samples_split);
    detail::read_count(j, "min_samples_leaf", p.min_samples_leaf);
    detail::read_count(j, "max_features", p.max_features);
    detail::read_param(j, "bootstrap", p.bootstrap);
    return p;
}

inline json to_json(const ForestParams& p) {
    return {{"n_trees", p.n_trees},
            {"max_depth", p.max_depth},
            {"min_samples_split", p.min_samples_split},
            {"min_samples_leaf", p.min_samples_leaf},
            {"max_features", p.max_features},
            {"bootstrap", p.bootstrap}};
}

inline BoostParams boost_params(const json& j) {
    detail::check_keys(j, {"n_estimators", "learning_rate", "max_depth", "min_samples_split", "min_samples_leaf", "subsample"},
                       "gbr");
    BoostParams p;
    detail::read_count(j, "n_estimators", p.n_estimators);
    detail::read_param(j, "learning_rate", p.learning_rate);
    detail::read_param(j, "max_depth", p.max_depth);
    detail::read_count(j, "min_samples_split", p.min_samples_split);
    detail::read_count(j, "min_samples_leaf", p.min_samples_leaf);
    detail::read_param(j, "subsample", p.subsample);
    return p;
}

inline json to_json(const BoostParams& p) {
    return {{"n_estimators", p.n_estimators},     {"learning_rate", p.learning_rate},       {"max_depth", p.max_depth},
            {"min_samples_split", p.min_samples_split}, {"min_samples_leaf", p.min_samples_leaf}, {"subsample", p.subsample}};
}

inline MlpParams mlp_params(const json& j) {
    detail::check_keys(j, {"hidden", "epochs", "learning_rate", "optimizer", "batch_size", "beta1", "beta2", "epsilon"}, "mlp");
    MlpParams p;
    detail::read_param(j, "hidden", p.hidden);
    detail::read_count(j, "epochs", p.epochs);
    detail::read_param(j, "learning_rate", p.learning_rate);
    if (j.contains("optimizer")) p.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    detail::read_count(j, "batch_size", p.batch_size);
    detail::read_param(j, "beta1", p.beta1);
    detail::read_param(j, "beta2", p.beta2);
    detail::read_param(j, "epsilon", p.epsilon);
    return p;
}

inline json to_json(const MlpParams& p) {
    return {{"hidden", p.hidden},        {"epochs", p.epochs},       {"learning_rate", p.learning_rate},
            {"optimizer", to_string(p.optimizer)}, {"batch_size", p.batch_size}, {"beta1", p.beta1},
            {"beta2", p.beta2},          {"epsilon", p.epsilon}};
}

/// Parameters with defaults filled in; unknown keys are rejected.
inline json resolve_params(PredictorKind kind, const json& j) {
    const json in = j.is_null() ? json::object() : j;
    switch (kind) {
    case PredictorKind::Linear: return to_json(linear_params(in));
    case PredictorKind::Forest: return to_json(forest_params(in));
    case PredictorKind::Boosting: return to_json(boost_params(in));
    case PredictorKind::Mlp: return to_json(mlp_params(in));
    }
    return in;
}

namespace detail {

inline json tree_to_json(const RegressionTree& t) {
    json f = json::array(), th = json::array(), l = json::array(), r = json::array(), v = json::array(), n = json::array();
    for (const auto& nd : t.nodes) {
        f.push_back(nd.feature);
        th.push_back(nd.threshold);
        l.push_back(nd.left);
        r.push_back(nd.right);
        v.push_back(nd.value);
        n.push_back(nd.n);
    }
    return {{"feature", f}, {"threshold", th}, {"left", l}, {"right", r}, {"value", v}, {"n", n}, {"sse_decrease", t.sse_decrease}};
}

inline RegressionTree tree_from_json(const json& j) {
    RegressionTree t;
    const auto f = j.at("feature").get<std::vector<int>>();
    const auto th = j.at("threshold").get<std::vector<double>>();
    const auto l = j.at("left").get<std::vector<int>>();
    const auto r = j.at("right").get<std::vector<int>>();
    const auto v = j.at("value").get<std::vector<double>>();
    const auto n = j.at("n").get<std::vector<std::size_t>>();
    if (f.empty() || th.size() != f.size() || l.size() != f.size() || r.size() != f.size() || v.size() != f.size() ||
        n.size() != f.size())
        throw DataError("malformed tree in model file");
    const int count = static_cast<int>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] >= 0 && (l[i] <= static_cast<int>(i) || r[i] <= static_cast<int>(i) || l[i] >= count || r[i] >= count))
            throw DataError("malformed tree in model file");
        t.nodes.push_back({f[i], th[i], l[i], r[i], v[i], n[i]});
    }
    t.sse_decrease = j.at("sse_decrease").get<std::vector<double>>();
    return t;
}

} // namespace detail

struct TrainedModel {
    using Fitted = std::variant<LinearModel, ForestModel, BoostModel, MlpModel>;

    PredictorKind kind = PredictorKind::Linear;
    json params;
    std::uint64_t seed = 0;
    std::vector<std::string> features;
    std::vector<double> impute;
    Fitted fitted;

    /// Rows in training feature order; missing values are imputed.
    std::vector<double> predict(const Matrix& raw) const {
        if (raw.cols != features.size())
            throw ParameterError("expected " + std::to_string(features.size()) + " features, got " + std::to_string(raw.cols));
        const Matrix x = gbmos::impute(raw, impute);
        if (const auto* mlp = std::get_if<MlpModel>(&fitted)) return mlp->predict(x);
        std::vector<double> out(x.rows);
        std::visit(
            [&](const auto& m) {
                if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, MlpModel>)
                    for (std::size_t r = 0; r < x.rows; ++r) out[r] = m.predict_row(x.row(r));
            },
            fitted);
        return out;
    }

    /// Looks up the training features by name; extra columns are ignored.
    std::vector<double> predict(const FeatureTable& t) const { return predict(select_features(t)); }

    Matrix select_features(const FeatureTable& t) const {
        std::vector<std::size_t> cols;
        for (const auto& name : features) {
            const auto c = t.column(name);
            if (!c) throw ParameterError("feature table lacks model feature '" + name + "'");
            cols.push_back(*c);
        }
        return Matrix::from_table(t).select_cols(cols);
    }

    /// Non-negative per-feature importance in training feature order.
    std::vector<double> importance() const {
        if (kind == PredictorKind::Mlp) throw ParameterError("importance undefined for this predictor");
        return std::visit(
            [](const auto& m) -> std::vector<double> {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MlpModel>) return {};
                else return m.importance();
            },
            fitted);
    }

    json to_json() const {
        json fit;
        if (const auto* m = std::get_if<LinearModel>(&fitted)) {
            fit = {{"coef", m->coef},       {"intercept", m->intercept}, {"mean", m->mean},
                   {"scale", m->scale},     {"std_coef", m->std_coef},   {"iterations", m->iterations}};
        } else if (const auto* m = std::get_if<ForestModel>(&fitted)) {
            json trees = json::array();
            for (const auto& t : m->trees) trees.push_back(detail::tree_to_json(t));
            fit = {{"max_features", m->max_features}, {"trees", trees}};
        } else if (const auto* m = std::get_if<BoostModel>(&fitted)) {
            json trees = json::array();
            for (const auto& t : m->trees) trees.push_back(detail::tree_to_json(t));
            fit = {{"init", m->init}, {"trees", trees}};
        } else if (const auto* m = std::get_if<MlpModel>(&fitted)) {
            fit = {{"sizes", m->sizes},   {"parameters", m->get_parameters()}, {"x_mean", m->x_mean}, {"x_scale", m->x_scale},
                   {"y_mean", m->y_mean}, {"y_scale", m->y_scale},            {"loss_history", m->loss_history}};
        }
        return {{"schema", kModelSchema}, {"kind", gbmos::to_string(kind)}, {"params", params}, {"seed", seed},
                {"features", features},   {"impute", impute},               {"fit", fit}};
    }

    static TrainedModel from_json(const json& j) {
        try {
            if (j.at("schema").get<std::string>() != kModelSchema)
                throw DataError("unsupported model schema '" + j.at("schema").get<std::string>() + "'");
            TrainedModel tm;
            tm.kind = parse_predictor(j.at("kind").get<std::string>());
            tm.params = resolve_params(tm.kind, j.at("params"));
            tm.seed = j.at("seed").get<std::uint64_t>();
            tm.features = j.at("features").get<std::vector<std::string>>();
            tm.impute = j.at("impute").get<std::vector<double>>();
            if (tm.impute.size() != tm.features.size()) throw DataError("imputation vector does not match the feature list");
            const auto& fit = j.at("fit");
            const std::size_t p = tm.features.size();
            switch (tm.kind) {
            case PredictorKind::Linear: {
                LinearModel m;
                m.params = linear_params(tm.params);
                m.coef = fit.at("coef").get<std::vector<double>>();
                m.intercept = fit.at("intercept").get<double>();
                m.mean = fit.at("mean").get<std::vector<double>>();
                m.scale = fit.at("scale").get<std::vector<double>>();
                m.std_coef = fit.at("std_coef").get<std::vector<double>>();
                m.iterations = fit.at("iterations").get<int>();
                if (m.coef.size() != p || m.std_coef.size() != p) throw DataError("coefficient count does not match features");
                tm.fitted = std::move(m);
                break;
            }
            case PredictorKind::Forest: {
                ForestModel m;
                m.params = forest_params(tm.params);
                m.seed = tm.seed;
                m.max_features = fit.at("max_features").get<std::size_t>();
                for (const auto& t : fit.at("trees")) m.trees.push_back(detail::tree_from_json(t));
                if (m.trees.empty()) throw DataError("forest without trees");
                tm.fitted = std::move(m);
                break;
            }
            case PredictorKind::Boosting: {
                BoostModel m;
                m.params = boost_params(tm.params);
                m.seed = tm.seed;
                m.init = fit.at("init").get<double>();
                for (const auto& t : fit.at("trees")) m.trees.push_back(detail::tree_from_json(t));
                tm.fitted = std::move(m);
                break;
            }
            case PredictorKind::Mlp: {
                MlpModel m;
                m.params = mlp_params(tm.params);
                m.seed = tm.seed;
                m.sizes = fit.at("sizes").get<std::vector<std::size_t>>();
                if (m.sizes.size() < 2 || m.sizes.front() != p || m.sizes.back() != 1) throw DataError("malformed network sizes");
                for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
                    m.weights.emplace_back(static_cast<Eigen::Index>(m.sizes[l + 1]), static_cast<Eigen::Index>(m.sizes[l]));
                    m.biases.emplace_back(static_cast<Eigen::Index>(m.sizes[l + 1]));
                }
                m.set_parameters(fit.at("parameters").get<std::vector<double>>());
                m.x_mean = fit.at("x_mean").get<std::vector<double>>();
                m.x_scale = fit.at("x_scale").get<std::vector<double>>();
                m.y_mean = fit.at("y_mean").get<double>();
                m.y_scale = fit.at("y_scale").get<double>();
                m.loss_history = fit.at("loss_history").get<std::vector<double>>();
                tm.fitted = std::move(m);
                break;
            }
            }
            return tm;
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed model file: ") + e.what());
        }
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write model file '" + path + "'");
        out << to_json().dump(1) << '\n';
        if (!out) throw DataError("cannot write model file '" + path + "'");
    }

    static TrainedModel load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open model file '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
};

/// Trains a predictor on raw features (NaN = missing). Missing values are
/// replaced by the per-feature training medians, which are kept in the model.
inline TrainedModel train_model(PredictorKind kind, const json& params, const Matrix& raw, std::span<const double> y,
                                std::vector<std::string> features, std::uint64_t seed) {
    if (features.size() != raw.cols) throw ParameterError("feature names do not match the matrix width");
    TrainedModel tm;
    tm.kind = kind;
    tm.params = resolve_params(kind, params);
    tm.seed = seed;
    tm.features = std::move(features);
    tm.impute = imputation_medians(raw);
    const Matrix x = impute(raw, tm.impute);
    switch (kind) {
    case PredictorKind::Linear: tm.fitted = train_linear(x, y, linear_params(tm.params)); break;
    case PredictorKind::Forest: tm.fitted = train_forest(x, y, forest_params(tm.params), seed); break;
    case PredictorKind::Boosting: tm.fitted = train_gbr(x, y, boost_params(tm.params), seed); break;
    case PredictorKind::Mlp: tm.fitted = train_mlp(x, y, mlp_params(tm.params), seed); break;
    }
    return tm;
}

inline TrainedModel train_model(PredictorKind kind, const json& params, const FeatureTable& table, std::span<const double> y,
                                std::uint64_t seed) {
    return train_model(kind, params, Matrix::from_table(table), y, table.names, seed);
}

} // namespace gbmos
