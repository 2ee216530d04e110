#pragma once

// Feature-set x predictor experiment matrix.
//
// Every cell trains on all labeled subjects (any resection status) and is
// scored twice: on the training subjects ("train") and on the evaluation
// subjects after the resection filter ("eval_gtr" or "eval_all"). The
// evaluation subjects are the training cohort unless a separate evaluation
// table is supplied. rfe20 ranks the radiomics columns once per run and all
// predictors share that ranking.
//
// Cell seeds are derive_seed(seed, feature set code, predictor code), so a
// cell's result does not depend on which other cells run.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/core/log.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/featselect/rfe.hpp"
#include "gbmos/prognosis/features.hpp"
#include "gbmos/prognosis/metrics.hpp"
#include "gbmos/regressors/grid_search.hpp"
#include "gbmos/volumeio/metadata.hpp"

namespace gbmos {

inline constexpr const char* kExperimentSchema = "gbmos.experiment/1";
inline constexpr const char* kMetricsSchema = "gbmos.metrics/1";

enum class EvalFilter { GtrOnly, All };

inline constexpr PredictorKind kAllPredictors[] = {PredictorKind::Mlp, PredictorKind::Linear, PredictorKind::Boosting,
                                                   PredictorKind::Forest};

/// Default search grids; values are configuration.
inline json default_grid(PredictorKind k) {
    switch (k) {
    case PredictorKind::Linear: return {{"penalty", {"none", "l1", "l2"}}, {"lambda", {0.1, 1.0, 10.0}}, {"max_iter", {1000}}};
    case PredictorKind::Forest: return {{"n_trees", {50, 100}}, {"max_depth", {-1, 8}}};
    case PredictorKind::Boosting:
        return {{"n_estimators", {100, 200}}, {"max_depth", {3, 5}}, {"min_samples_split", {2, 8}}, {"learning_rate", {0.05, 0.1}}};
    case PredictorKind::Mlp:
        return {{"epochs", {100, 200}}, {"learning_rate", {1e-3, 1e-2}}, {"hidden", {{32, 32, 16, 16, 8}}}, {"optimizer", {"adam", "sgd"}}};
    }
    return json::object();
}

struct ExperimentConfig {
    std::string dataset = "cohort";
    std::uint64_t seed = 1;
    std::vector<FeatureSet> feature_sets{std::begin(kAllFeatureSets), std::end(kAllFeatureSets)};
    std::vector<PredictorKind> predictors{std::begin(kAllPredictors), std::end(kAllPredictors)};
    EvalFilter filter = EvalFilter::GtrOnly;
    SurvivalThresholds thresholds;
    std::size_t folds = 5;
    std::map<PredictorKind, json> params; // base hyperparameters
    std::map<PredictorKind, json> grids;  // null = train base parameters directly
    EstimatorSpec rfe_estimator;
    std::size_t rfe_keep = 20;
    std::size_t rfe_step = 1;

    ExperimentConfig() {
        for (auto k : kAllPredictors) {
            params[k] = json::object();
            grids[k] = default_grid(k);
        }
    }

    json to_json() const {
        json fs = json::array(), pr = json::array(), pa = json::object(), gr = json::object();
        for (auto f : feature_sets) fs.push_back(to_string(f));
        for (auto p : predictors) pr.push_back(to_string(p));
        for (const auto& [k, v] : params) pa[to_string(k)] = resolve_params(k, v);
        for (const auto& [k, v] : grids) gr[to_string(k)] = v;
        return {{"schema", kExperimentSchema},
                {"dataset", dataset},
                {"seed", seed},
                {"feature_sets", fs},
                {"predictors", pr},
                {"evaluation", filter == EvalFilter::GtrOnly ? "gtr" : "all"},
                {"thresholds", {{"short_below", thresholds.short_below}, {"long_above", thresholds.long_above}}},
                {"folds", folds},
                {"params", pa},
                {"grids", gr},
                {"rfe", {{"estimator", rfe_estimator.to_json()}, {"n_keep", rfe_keep}, {"step", rfe_step}}}};
    }

    /// Overlays `j` on the defaults; unknown keys are rejected.
    static ExperimentConfig from_json(const json& j) {
        ExperimentConfig c;
        static const std::set<std::string> known{"schema",    "dataset", "seed",   "feature_sets", "predictors", "evaluation",
                                                 "thresholds", "folds",  "params", "grids",        "rfe"};
        detail::check_keys(j, known, "experiment");
        try {
            if (j.contains("schema") && j.at("schema") != kExperimentSchema)
                throw ParameterError("unsupported experiment schema " + j.at("schema").dump());
            if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
            if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("feature_sets")) {
                c.feature_sets.clear();
                for (const auto& s : j.at("feature_sets")) c.feature_sets.push_back(parse_feature_set(s.get<std::string>()));
            }
            if (j.contains("predictors")) {
                c.predictors.clear();
                for (const auto& s : j.at("predictors")) c.predictors.push_back(parse_predictor(s.get<std::string>()));
            }
            if (j.contains("evaluation")) {
                const auto e = j.at("evaluation").get<std::string>();
                if (e == "gtr") c.filter = EvalFilter::GtrOnly;
                else if (e == "all") c.filter = EvalFilter::All;
                else throw ParameterError("evaluation must be 'gtr' or 'all'");
            }
            if (j.contains("thresholds")) {
                const auto& t = j.at("thresholds");
                detail::check_keys(t, {"short_below", "long_above"}, "thresholds");
                if (t.contains("short_below")) c.thresholds.short_below = t.at("short_below").get<double>();
                if (t.contains("long_above")) c.thresholds.long_above = t.at("long_above").get<double>();
                c.thresholds.validate();
            }
            if (j.contains("folds")) c.folds = j.at("folds").get<std::size_t>();
            if (j.contains("params"))
                for (const auto& [k, v] : j.at("params").items()) c.params[parse_predictor(k)] = resolve_params(parse_predictor(k), v);
            if (j.contains("grids"))
                for (const auto& [k, v] : j.at("grids").items()) {
                    const auto kind = parse_predictor(k);
                    if (v == "default") {
                        c.grids[kind] = default_grid(kind);
                        continue;
                    }
                    if (!v.is_null()) expand_grid(c.params[kind], v); // validates shape
                    c.grids[kind] = v;
                }
            if (j.contains("rfe")) {
                const auto& r = j.at("rfe");
                detail::check_keys(r, {"estimator", "n_keep", "step"}, "rfe");
                if (r.contains("n_keep")) c.rfe_keep = r.at("n_keep").get<std::size_t>();
                if (r.contains("step")) c.rfe_step = r.at("step").get<std::size_t>();
                if (r.contains("estimator")) {
                    const auto& e = r.at("estimator");
                    detail::check_keys(e, {"predictor", "params"}, "rfe estimator");
                    if (e.contains("predictor")) c.rfe_estimator.kind = parse_predictor(e.at("predictor").get<std::string>());
                    if (e.contains("params")) c.rfe_estimator.params = e.at("params");
                    resolve_params(c.rfe_estimator.kind, c.rfe_estimator.params);
                }
            }
        } catch (const json::exception& e) {
            throw ParameterError(std::string("malformed experiment config: ") + e.what());
        }
        return c;
    }
};

struct LabeledSet {
    FeatureTable table; // labeled rows only
    std::vector<double> days;
    std::vector<Resection> resection;
};

/// Rows of `table` whose subject has a known survival; subjects are matched by ID.
inline LabeledSet labeled_rows(const FeatureTable& table, const std::vector<SubjectRecord>& subjects) {
    std::unordered_map<std::string, const SubjectRecord*> by_id;
    for (const auto& s : subjects) by_id[s.subject_id] = &s;
    LabeledSet out;
    out.table.names = table.names;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto it = by_id.find(table.ids[r]);
        if (it == by_id.end() || !it->second->survival_days) continue;
        out.table.add_row(table.ids[r], table.row(r));
        out.days.push_back(*it->second->survival_days);
        out.resection.push_back(it->second->resection);
    }
    return out;
}

inline LabeledSet filter_resection(const LabeledSet& s, EvalFilter f) {
    if (f == EvalFilter::All) return s;
    LabeledSet out;
    out.table.names = s.table.names;
    for (std::size_t r = 0; r < s.days.size(); ++r) {
        if (s.resection[r] != Resection::GTR) continue;
        out.table.add_row(s.table.ids[r], s.table.row(r));
        out.days.push_back(s.days[r]);
        out.resection.push_back(s.resection[r]);
    }
    return out;
}

struct ExperimentData {
    FeatureTable table;
    std::vector<SubjectRecord> subjects;
    std::optional<FeatureTable> eval_table; // default: the training cohort
    std::vector<SubjectRecord> eval_subjects;
};

struct CellResult {
    FeatureSet feature_set = FeatureSet::Image7;
    PredictorKind predictor = PredictorKind::Linear;
    std::uint64_t seed = 0;
    std::vector<std::string> features;
    std::optional<TrainedModel> model;
    std::optional<GridSearchReport> grid;
    Metrics train, eval;
    std::string error; // empty on success
};

inline std::uint64_t cell_seed(std::uint64_t seed, FeatureSet f, PredictorKind p) {
    return derive_seed(seed, static_cast<std::uint64_t>(f) + 1, static_cast<std::uint64_t>(p) + 1);
}

inline std::uint64_t rfe_seed(std::uint64_t seed) { return derive_seed(seed, 0xFE); }

inline void require_columns(const FeatureTable& t, const std::vector<std::string>& cols, const std::string& what) {
    for (const auto& c : cols)
        if (!t.column(c)) throw DataError("feature table lacks column '" + c + "' required by " + what);
}

inline FeatureRanking rank_radiomics(const LabeledSet& train, const ExperimentConfig& cfg) {
    const auto pool = feature_set_columns(FeatureSet::Rfe20);
    require_columns(train.table, pool, "feature set 'rfe20'");
    return rfe(train.table.select(pool), train.days, cfg.rfe_estimator, cfg.rfe_keep, cfg.rfe_step, rfe_seed(cfg.seed));
}

/// One matrix cell. `ranking` is required for rfe20.
inline CellResult run_cell(const LabeledSet& train, const LabeledSet& eval, const ExperimentConfig& cfg, FeatureSet set,
                           PredictorKind pred, const FeatureRanking* ranking) {
    CellResult res;
    res.feature_set = set;
    res.predictor = pred;
    res.seed = cell_seed(cfg.seed, set, pred);
    if (set == FeatureSet::Rfe20) {
        if (!ranking) throw ParameterError("rfe20 needs a feature ranking");
        res.features = ranking->kept;
    } else {
        res.features = feature_set_columns(set);
    }
    const std::string what = "feature set '" + to_string(set) + "'";
    require_columns(train.table, res.features, what);
    require_columns(eval.table, res.features, what);
    if (train.days.size() < 2) throw DataError("fewer than 2 labeled training subjects");
    if (eval.days.empty()) throw DataError("empty evaluation set after resection filtering");

    const auto xt = train.table.select(res.features);
    const auto base = cfg.params.count(pred) ? cfg.params.at(pred) : json::object();
    const auto grid = cfg.grids.count(pred) ? cfg.grids.at(pred) : json();
    if (!grid.is_null()) {
        auto gs = grid_search_cv(pred, base, grid, Matrix::from_table(xt), train.days, res.features, cfg.folds, res.seed);
        res.grid = std::move(gs.report);
        res.model = std::move(gs.model);
    } else {
        res.model = train_model(pred, base, xt, train.days, res.seed);
    }
    res.train = evaluate(res.model->predict(xt), train.days, cfg.thresholds);
    res.eval = evaluate(res.model->predict(eval.table), eval.days, cfg.thresholds);
    return res;
}

struct MatrixResult {
    std::vector<CellResult> cells;
    std::optional<FeatureRanking> ranking;
    std::size_t failed = 0;
};

enum class Split { Train, Eval };

/// One row per cell for the chosen split; failed cells get NA metrics.
inline csv::Table metrics_table(const MatrixResult& m, const ExperimentConfig& cfg, Split split) {
    csv::Table t;
    t.header = {"dataset", "feature_set", "predictor", "accuracy", "mse", "median_se", "std_se", "spearman_r", "n", "seed", "thresholds"};
    const std::string name = split == Split::Train ? "train" : cfg.filter == EvalFilter::GtrOnly ? "eval_gtr" : "eval_all";
    for (const auto& c : m.cells) {
        const Metrics& met = split == Split::Train ? c.train : c.eval;
        std::vector<std::string> row{cfg.dataset + ":" + name, to_string(c.feature_set), to_string(c.predictor)};
        if (c.error.empty()) {
            for (double v : {met.accuracy, met.mse, met.median_se, met.std_se, met.spearman_r}) row.push_back(csv::format_real(v));
            row.push_back(std::to_string(met.n));
        } else {
            for (int k = 0; k < 6; ++k) row.push_back("NA");
        }
        row.push_back(std::to_string(c.seed));
        row.push_back(cfg.thresholds.describe());
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("cannot write '" + path.string() + "'");
}

/// Runs the matrix and, when `out_dir` is non-empty, writes
///   run_config.json, metrics.csv (evaluation split), metrics_train.csv,
///   rfe20_ranking.csv (if used),
///   <set>_<predictor>/model.json and grid.json (if searched).
inline MatrixResult run_experiment_matrix(const ExperimentData& data, const ExperimentConfig& cfg, const std::string& out_dir = "") {
    if (cfg.feature_sets.empty() || cfg.predictors.empty()) throw ParameterError("experiment needs feature sets and predictors");
    const auto train = labeled_rows(data.table, data.subjects);
    const auto eval_all = data.eval_table ? labeled_rows(*data.eval_table, data.eval_subjects) : train;
    const auto eval = filter_resection(eval_all, cfg.filter);
    if (train.days.size() < 2) throw DataError("fewer than 2 labeled training subjects");
    if (eval.days.empty()) throw DataError("empty evaluation set after resection filtering");

    MatrixResult res;
    std::string rank_error;
    if (std::find(cfg.feature_sets.begin(), cfg.feature_sets.end(), FeatureSet::Rfe20) != cfg.feature_sets.end()) {
        try {
            res.ranking = rank_radiomics(train, cfg);
        } catch (const Error& e) {
            rank_error = std::string("rfe: ") + e.what();
            log::error(rank_error);
        }
    }

    std::vector<std::pair<FeatureSet, PredictorKind>> plan;
    for (auto f : cfg.feature_sets)
        for (auto p : cfg.predictors) plan.emplace_back(f, p);
    res.cells.resize(plan.size());
    parallel_for(plan.size(), [&](std::size_t i) {
        const auto [f, p] = plan[i];
        try {
            if (f == FeatureSet::Rfe20 && !res.ranking) throw DataError(rank_error);
            res.cells[i] = run_cell(train, eval, cfg, f, p, res.ranking ? &*res.ranking : nullptr);
        } catch (const Error& e) {
            res.cells[i] = CellResult{};
            res.cells[i].feature_set = f;
            res.cells[i].predictor = p;
            res.cells[i].seed = cell_seed(cfg.seed, f, p);
            res.cells[i].error = e.what();
        }
    });
    for (const auto& c : res.cells)
        if (!c.error.empty()) {
            ++res.failed;
            log::error("cell " + to_string(c.feature_set) + "/" + to_string(c.predictor) + " failed: " + c.error);
        }

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "run_config.json",
                   {{"config", cfg.to_json()},
                    {"schemas", {{"model", kModelSchema}, {"metrics", kMetricsSchema}, {"radiomics", kRadiomicsManifestVersion}}},
                    {"n_train", train.days.size()},
                    {"n_eval", eval.days.size()}});
        csv::write((fs::path(out_dir) / "metrics.csv").string(), metrics_table(res, cfg, Split::Eval));
        csv::write((fs::path(out_dir) / "metrics_train.csv").string(), metrics_table(res, cfg, Split::Train));
        if (res.ranking) res.ranking->write_csv((fs::path(out_dir) / "rfe20_ranking.csv").string());
        for (const auto& c : res.cells) {
            if (!c.error.empty()) continue;
            const auto dir = fs::path(out_dir) / (to_string(c.feature_set) + "_" + to_string(c.predictor));
            fs::create_directories(dir);
            c.model->save((dir / "model.json").string());
            if (c.grid) write_json(dir / "grid.json", c.grid->to_json());
        }
    }
    return res;
}

} // namespace gbmos
