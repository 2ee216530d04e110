// gbmos command-line tool.
//
// Every command resolves its options as: built-in defaults, then the JSON
// object in --config, then flags given on the command line. The resolved
// options are written to <out-dir>/run_config.json next to the outputs.
//
// Exit codes: 0 success, 1 error, 2 partial failure (some subjects or
// experiment cells failed).

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/core/log.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/featselect/rfe.hpp"
#include "gbmos/phantoms/cohort.hpp"
#include "gbmos/phantoms/phantom.hpp"
#include "gbmos/prognosis/experiment.hpp"
#include "gbmos/prognosis/features.hpp"
#include "gbmos/prognosis/metrics.hpp"
#include "gbmos/regressors/grid_search.hpp"
#include "gbmos/regressors/model.hpp"
#include "gbmos/volumeio/metadata.hpp"
#include "gbmos/volumeio/nifti.hpp"

using namespace gbmos;
namespace fs = std::filesystem;

namespace {

constexpr const char* kRunConfigSchema = "gbmos.run_config/1";
constexpr int kPartial = 2;

/// Binds CLI flags to keys of a JSON options object. Only flags actually
/// given on the command line override the defaults and the config file.
class Options {
public:
    Options(CLI::App* app, json defaults) : app_(app), values_(std::move(defaults)) {
        app_->add_option("--config", config_path_, "JSON file with options for this command");
    }

    void text(const std::string& flag, const std::string& key, const std::string& help) {
        auto v = std::make_shared<std::string>();
        auto* o = app_->add_option(flag, *v, help);
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = *v;
        });
    }

    void integer(const std::string& flag, const std::string& key, const std::string& help) {
        auto v = std::make_shared<std::int64_t>();
        auto* o = app_->add_option(flag, *v, help);
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = *v;
        });
    }

    void count(const std::string& flag, const std::string& key, const std::string& help) {
        auto v = std::make_shared<std::uint64_t>();
        auto* o = app_->add_option(flag, *v, help);
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = *v;
        });
    }

    void real(const std::string& flag, const std::string& key, const std::string& help) {
        auto v = std::make_shared<double>();
        auto* o = app_->add_option(flag, *v, help);
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = *v;
        });
    }

    /// Boolean switch that sets `key` to `value` when present.
    void toggle(const std::string& flag, const std::string& key, json value, const std::string& help) {
        auto* o = app_->add_flag(flag, help);
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = value;
        });
    }

    /// JSON-valued flag: inline JSON text, or @path to read it from a file.
    void structured(const std::string& flag, const std::string& key, const std::string& help) {
        auto v = std::make_shared<std::string>();
        auto* o = app_->add_option(flag, *v, help + " (JSON text or @file)");
        apply_.push_back([=](json& j) {
            if (o->count()) j[key] = parse_json_arg(*v, flag);
        });
    }

    json resolve() const {
        json out = values_;
        if (!config_path_.empty()) {
            const json file = read_json(config_path_);
            if (!file.is_object()) throw ParameterError("config file '" + config_path_ + "' must hold a JSON object");
            for (const auto& [k, v] : file.items()) {
                if (!out.contains(k)) throw ParameterError("config file '" + config_path_ + "': unknown option '" + k + "'");
                out[k] = v;
            }
        }
        for (const auto& f : apply_) f(out);
        return out;
    }

    static json read_json(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open '" + path + "'");
        try {
            return json::parse(in);
        } catch (const json::exception& e) {
            throw DataError("'" + path + "' is not valid JSON: " + e.what());
        }
    }

    static json parse_json_arg(const std::string& text, const std::string& flag) {
        if (!text.empty() && text[0] == '@') return read_json(text.substr(1));
        try {
            return json::parse(text);
        } catch (const json::exception& e) {
            throw ParameterError(flag + ": not valid JSON: " + e.what());
        }
    }

private:
    CLI::App* app_;
    json values_;
    std::string config_path_;
    std::vector<std::function<void(json&)>> apply_;
};

std::string required_path(const json& opt, const std::string& key) {
    const auto v = opt.at(key).get<std::string>();
    if (v.empty()) throw ParameterError("option '" + key + "' is required");
    return v;
}

fs::path prepare_out_dir(const json& opt) {
    const fs::path dir = required_path(opt, "out_dir");
    fs::create_directories(dir);
    return dir;
}

void echo_config(const fs::path& dir, const std::string& command, const json& opt) {
    write_json(dir / "run_config.json", {{"schema", kRunConfigSchema},
                                         {"command", command},
                                         {"options", opt},
                                         {"schemas",
                                          {{"model", kModelSchema},
                                           {"experiment", kExperimentSchema},
                                           {"metrics", kMetricsSchema},
                                           {"radiomics", kRadiomicsManifestVersion}}}});
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string substitute(std::string pattern, const std::string& key, const std::string& value) {
    const std::string token = "{" + key + "}";
    for (auto pos = pattern.find(token); pos != std::string::npos; pos = pattern.find(token, pos + value.size()))
        pattern.replace(pos, token.size(), value);
    return pattern;
}

SurvivalThresholds thresholds_from(const json& j) {
    SurvivalThresholds t;
    if (j.contains("short_below")) t.short_below = j.at("short_below").get<double>();
    if (j.contains("long_above")) t.long_above = j.at("long_above").get<double>();
    t.validate();
    return t;
}

json thresholds_json(const SurvivalThresholds& t) { return {{"short_below", t.short_below}, {"long_above", t.long_above}}; }

/// Feature columns for train: a named set, "all", a comma list, or the kept
/// features of an RFE ranking.
std::vector<std::string> resolve_columns(const json& opt, const FeatureTable& table) {
    const auto ranking = opt.at("ranking").get<std::string>();
    if (!ranking.empty()) {
        const auto t = csv::read(ranking);
        const auto fc = t.require_column("feature"), kc = t.require_column("kept");
        std::vector<std::string> kept;
        for (const auto& row : t.rows)
            if (row[kc] == "1") kept.push_back(row[fc]);
        if (kept.empty()) throw DataError("ranking '" + ranking + "' keeps no features");
        return kept;
    }
    const auto set = opt.at("feature_set").get<std::string>();
    if (set == "all") return table.names;
    if (set == "rfe20") throw ParameterError("feature_set rfe20 needs --ranking (run the rfe command first)");
    if (set == "image7" || set == "radiomics107" || set == "shape") return feature_set_columns(parse_feature_set(set));
    return split_list(set);
}

// ---- phantom -------------------------------------------------------------

Shape parse_shape(const json& p) {
    const auto kind = p.at("shape").get<std::string>();
    if (kind == "sphere") return Sphere{p.at("radius").get<double>()};
    if (kind == "ellipsoid") {
        const auto a = p.at("axes").get<std::array<double, 3>>();
        return Ellipsoid{a[0], a[1], a[2]};
    }
    if (kind == "cuboid") {
        const auto a = p.at("size").get<std::array<double, 3>>();
        return Cuboid{a[0], a[1], a[2]};
    }
    if (kind == "single_voxel") return SingleVoxel{};
    throw ParameterError("unknown phantom shape '" + kind + "' (sphere, ellipsoid, cuboid, single_voxel)");
}

Geometry parse_geometry(const json& p) {
    Geometry g;
    g.dims = p.at("dims").get<Index3>();
    if (p.contains("spacing")) g.spacing = p.at("spacing").get<Vec3>();
    g.validate();
    return g;
}

CohortSpec parse_cohort(const json& c) {
    static const std::set<std::string> known{"n_subjects", "seed",     "n_latent", "link",       "phantom",      "class_mix",
                                             "class_margin_days", "pivot", "thresholds", "min_days", "max_days", "resection_mix",
                                             "min_age",    "max_age"};
    detail::check_keys(c, known, "cohort");
    CohortSpec s;
    if (c.contains("n_subjects")) s.n_subjects = c.at("n_subjects").get<std::size_t>();
    if (c.contains("seed")) s.seed = c.at("seed").get<std::uint64_t>();
    if (c.contains("n_latent")) s.n_latent = c.at("n_latent").get<std::size_t>();
    if (c.contains("link")) {
        const auto& l = c.at("link");
        detail::check_keys(l, {"intercept", "coefficients", "noise_sd"}, "link");
        if (l.contains("intercept")) s.link.intercept = l.at("intercept").get<double>();
        if (l.contains("noise_sd")) s.link.noise_sd = l.at("noise_sd").get<double>();
        if (l.contains("coefficients"))
            for (const auto& term : l.at("coefficients")) s.link.coefficients.emplace_back(term.at(0).get<std::string>(), term.at(1).get<double>());
    }
    if (c.contains("phantom")) {
        if (c.at("phantom").is_null()) {
            s.phantom.reset();
        } else {
            const auto& p = c.at("phantom");
            detail::check_keys(p, {"dims", "spacing", "min_radius", "max_radius"}, "cohort phantom");
            PhantomGrid g;
            if (p.contains("dims")) g.dims = p.at("dims").get<Index3>();
            if (p.contains("spacing")) g.spacing = p.at("spacing").get<Vec3>();
            if (p.contains("min_radius")) g.min_radius = p.at("min_radius").get<double>();
            if (p.contains("max_radius")) g.max_radius = p.at("max_radius").get<double>();
            s.phantom = g;
        }
    }
    if (c.contains("class_mix") && !c.at("class_mix").is_null()) s.class_mix = c.at("class_mix").get<std::array<double, 3>>();
    if (c.contains("class_margin_days")) s.class_margin_days = c.at("class_margin_days").get<double>();
    if (c.contains("pivot")) s.pivot = c.at("pivot").get<std::string>();
    if (c.contains("thresholds")) s.thresholds = thresholds_from(c.at("thresholds"));
    if (c.contains("min_days")) s.min_days = c.at("min_days").get<double>();
    if (c.contains("max_days")) s.max_days = c.at("max_days").get<double>();
    if (c.contains("resection_mix")) s.resection_mix = c.at("resection_mix").get<std::array<double, 3>>();
    if (c.contains("min_age")) s.min_age = c.at("min_age").get<double>();
    if (c.contains("max_age")) s.max_age = c.at("max_age").get<double>();
    return s;
}

int cmd_phantom(const json& opt) {
    const auto spec = Options::read_json(required_path(opt, "spec"));
    const auto dir = prepare_out_dir(opt);
    const auto channel = opt.at("channel").get<std::string>();
    const bool images = opt.at("write_images").get<bool>();
    fs::create_directories(dir / "masks");
    fs::create_directories(dir / "scans");
    const auto mask_path = [&](const std::string& id) { return (dir / "masks" / (id + "_seg.nii.gz")).string(); };
    const auto scan_path = [&](const std::string& id) { return (dir / "scans" / (id + "_" + channel + ".nii.gz")).string(); };
    std::vector<SubjectRecord> subjects;

    if (spec.contains("cohort")) {
        auto cs = parse_cohort(spec.at("cohort"));
        if (!opt.at("seed").is_null()) cs.seed = opt.at("seed").get<std::uint64_t>();
        const auto cohort = gen_cohort(cs);
        cohort.features.write((dir / "cohort_features.csv").string());
        csv::Table link;
        link.header = {"ID", "link_days"};
        for (std::size_t i = 0; i < cohort.subjects.size(); ++i)
            link.rows.push_back({cohort.subjects[i].subject_id, csv::format_real(cohort.link_output[i])});
        csv::write((dir / "link.csv").string(), link);
        subjects = cohort.subjects;
        if (images && cohort.grid) {
            parallel_for(subjects.size(), [&](std::size_t i) {
                const auto mask = subject_mask(cohort, i);
                nifti::write_mask(mask_path(subjects[i].subject_id), mask);
                nifti::write_nifti(scan_path(subjects[i].subject_id), gen_intensity(mask, intensity_seed(cs.seed, i)),
                                   {nifti::Datatype::Float64, false});
            });
        }
    }
    if (spec.contains("phantoms")) {
        const std::uint64_t seed = opt.at("seed").is_null() ? 1 : opt.at("seed").get<std::uint64_t>();
        std::size_t idx = 0;
        for (const auto& p : spec.at("phantoms")) {
            SubjectRecord rec;
            rec.subject_id = p.at("id").get<std::string>();
            rec.age = p.value("age", 60.0);
            if (p.contains("survival_days")) rec.survival_days = p.at("survival_days").get<double>();
            rec.resection = parse_resection(p.value("resection", std::string("NA")));
            rec.validate();
            const auto g = parse_geometry(p);
            LabelMask mask(g);
            for (const auto& layer : p.at("layers")) {
                const int label = layer.at("label").get<int>();
                if (!is_valid_label(label) || label == 0) throw ParameterError("phantom layer label must be 1, 2 or 4");
                paint(mask, PhantomSpec{parse_shape(layer), layer.at("center").get<Vec3>(), static_cast<Label>(label), g});
            }
            if (images) {
                nifti::write_mask(mask_path(rec.subject_id), mask);
                nifti::write_nifti(scan_path(rec.subject_id), gen_intensity(mask, derive_seed(seed, idx)), {nifti::Datatype::Float64, false});
            }
            subjects.push_back(rec);
            ++idx;
        }
    }
    if (subjects.empty()) throw ParameterError("phantom spec needs a 'cohort' object or a 'phantoms' array");
    csv::write((dir / "metadata.csv").string(), metadata_table(subjects));
    echo_config(dir, "phantom", {{"options", opt}, {"spec", spec}});
    std::cout << "wrote " << subjects.size() << " subjects to " << dir.string() << "\n";
    return 0;
}

// ---- extract -------------------------------------------------------------

int cmd_extract(const json& opt) {
    const auto subjects = read_metadata(required_path(opt, "metadata"));
    const auto dir = prepare_out_dir(opt);
    const bool with_radiomics = opt.at("radiomics").get<bool>();
    RadiomicsConfig rc;
    rc.channel = opt.at("channel").get<std::string>();
    rc.roi_kind = roi_kind_from_string(opt.at("roi").get<std::string>());
    rc.binning = parse_binning(opt.at("binning").get<std::string>());
    rc.gldm_alpha = opt.at("gldm_alpha").get<int>();
    rc.shape.smoothing_iterations = opt.at("smoothing_iterations").get<int>();
    if (with_radiomics && rc.channel.empty()) throw ParameterError("radiomics need --channel (which scan feeds intensity features)");
    const fs::path data_dir = opt.at("data_dir").get<std::string>();
    const auto mask_pattern = opt.at("mask_pattern").get<std::string>();
    const auto scan_pattern = opt.at("scan_pattern").get<std::string>();

    const std::size_t n = subjects.size();
    std::vector<std::vector<double>> rows(n);
    std::vector<std::string> errors(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& s = subjects[i];
        try {
            const auto mpath = data_dir / substitute(mask_pattern, "id", s.subject_id);
            const auto mask = nifti::load_mask(mpath.string());
            std::optional<VoxelVolume> vol;
            if (with_radiomics) {
                const auto spath = data_dir / substitute(substitute(scan_pattern, "id", s.subject_id), "channel", rc.channel);
                vol = nifti::load_nifti(spath.string());
                if (!vol->geometry.same_grid(mask.geometry)) throw DataError("scan and mask grids differ");
            }
            rows[i] = subject_features(mask, vol ? &*vol : nullptr, s, with_radiomics ? &rc : nullptr);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    FeatureTable table;
    table.names = subject_feature_names(with_radiomics);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            ++failed;
            log::error("subject " + subjects[i].subject_id + " skipped: " + errors[i]);
            continue;
        }
        table.add_row(subjects[i].subject_id, rows[i]);
    }
    echo_config(dir, "extract", opt);
    if (table.rows() == 0) throw DataError("no subject could be extracted");
    table.write((dir / "features.csv").string());
    std::cout << "extracted " << table.rows() << " of " << n << " subjects";
    if (failed) std::cout << " (" << failed << " failed)";
    std::cout << "\n";
    return failed ? kPartial : 0;
}

// ---- rfe -----------------------------------------------------------------

int cmd_rfe(const json& opt) {
    const auto table = FeatureTable::read(required_path(opt, "features"));
    const auto subjects = read_metadata(required_path(opt, "metadata"));
    const auto dir = prepare_out_dir(opt);
    const auto labeled = labeled_rows(table, subjects);
    const auto cand = opt.at("candidates").get<std::string>();
    const auto pool = cand == "all" ? table.names : cand == "radiomics107" ? radiomics_feature_names() : split_list(cand);
    require_columns(table, pool, "rfe candidates");
    const EstimatorSpec est{parse_predictor(opt.at("estimator").get<std::string>()), opt.at("params")};
    const auto ranking = rfe(labeled.table.select(pool), labeled.days, est, opt.at("n_keep").get<std::size_t>(),
                             opt.at("step").get<std::size_t>(), opt.at("seed").get<std::uint64_t>());
    ranking.write_csv((dir / "ranking.csv").string());
    auto kept_cols = ranking.kept;
    table.select(kept_cols).write((dir / "features_reduced.csv").string());
    json resolved = opt;
    resolved["estimator_resolved"] = est.to_json();
    resolved["n_labeled"] = labeled.days.size();
    echo_config(dir, "rfe", resolved);
    std::cout << "kept " << ranking.kept.size() << " of " << pool.size() << " features\n";
    return 0;
}

// ---- train / predict -------------------------------------------------------

int cmd_train(const json& opt) {
    const auto table = FeatureTable::read(required_path(opt, "features"));
    const auto subjects = read_metadata(required_path(opt, "metadata"));
    const auto dir = prepare_out_dir(opt);
    const auto kind = parse_predictor(opt.at("predictor").get<std::string>());
    const auto labeled = labeled_rows(table, subjects);
    const auto cols = resolve_columns(opt, table);
    require_columns(table, cols, "train");
    const auto x = labeled.table.select(cols);
    const auto seed = opt.at("seed").get<std::uint64_t>();
    json grid = opt.at("grid");
    if (grid.is_string()) {
        if (grid != "default") throw ParameterError("grid must be a JSON object, \"default\" or null");
        grid = default_grid(kind);
    }
    json resolved = opt;
    resolved["features_used"] = cols;
    resolved["n_labeled"] = labeled.days.size();
    std::optional<TrainedModel> model;
    if (!grid.is_null()) {
        auto gs = grid_search_cv(kind, opt.at("params"), grid, Matrix::from_table(x), labeled.days, cols,
                                 opt.at("folds").get<std::size_t>(), seed);
        write_json(dir / "grid.json", gs.report.to_json());
        resolved["grid_resolved"] = grid;
        model = std::move(gs.model);
    } else {
        model = train_model(kind, opt.at("params"), x, labeled.days, seed);
    }
    model->save((dir / "model.json").string());
    echo_config(dir, "train", resolved);
    std::cout << "trained " << to_string(kind) << " on " << labeled.days.size() << " subjects, " << cols.size() << " features\n";
    return 0;
}

int cmd_predict(const json& opt) {
    const auto model = TrainedModel::load(required_path(opt, "model"));
    const auto table = FeatureTable::read(required_path(opt, "features"));
    const auto dir = prepare_out_dir(opt);
    const auto pred = model.predict(table);
    csv::Table out;
    out.header = {"ID", "predicted_days"};
    for (std::size_t r = 0; r < table.rows(); ++r) out.rows.push_back({table.ids[r], csv::format_real(pred[r])});
    csv::write((dir / "predictions.csv").string(), out);
    echo_config(dir, "predict", opt);
    std::cout << "predicted " << pred.size() << " subjects\n";
    return 0;
}

// ---- evaluate --------------------------------------------------------------

int cmd_evaluate(const json& opt) {
    const auto pred_table = csv::read(required_path(opt, "predictions"));
    const auto subjects = read_metadata(required_path(opt, "metadata"));
    const auto dir = prepare_out_dir(opt);
    const auto thresholds = thresholds_from(opt.at("thresholds"));
    const auto filter = opt.at("evaluation").get<std::string>();
    if (filter != "gtr" && filter != "all") throw ParameterError("evaluation must be 'gtr' or 'all'");
    std::unordered_map<std::string, const SubjectRecord*> by_id;
    for (const auto& s : subjects) by_id[s.subject_id] = &s;
    const auto idc = pred_table.require_column("ID"), pc = pred_table.require_column("predicted_days");
    std::vector<double> pred, truth;
    for (const auto& row : pred_table.rows) {
        const auto it = by_id.find(row[idc]);
        if (it == by_id.end() || !it->second->survival_days) continue;
        if (filter == "gtr" && it->second->resection != Resection::GTR) continue;
        const auto v = csv::parse_real(row[pc]);
        if (!v) throw DataError("subject " + row[idc] + ": prediction is not a number");
        pred.push_back(*v);
        truth.push_back(*it->second->survival_days);
    }
    if (pred.empty()) throw DataError("no labeled subjects left to evaluate after filtering");
    const auto m = evaluate(pred, truth, thresholds);
    csv::Table t;
    t.header = {"dataset", "feature_set", "predictor", "accuracy", "mse", "median_se", "std_se", "spearman_r", "n", "seed", "thresholds"};
    t.rows.push_back({opt.at("dataset").get<std::string>() + ":eval_" + filter, opt.at("feature_set").get<std::string>(),
                      opt.at("predictor").get<std::string>(), csv::format_real(m.accuracy), csv::format_real(m.mse),
                      csv::format_real(m.median_se), csv::format_real(m.std_se), csv::format_real(m.spearman_r),
                      std::to_string(m.n), opt.at("seed").is_null() ? "NA" : opt.at("seed").dump(), thresholds.describe()});
    csv::write((dir / "metrics.csv").string(), t);
    echo_config(dir, "evaluate", opt);
    std::cout << "accuracy " << csv::format_real(m.accuracy) << "  mse " << csv::format_real(m.mse) << "  spearman "
              << csv::format_real(m.spearman_r) << "  (n=" << m.n << ")\n";
    return 0;
}

// ---- experiment ------------------------------------------------------------

int cmd_experiment(const json& opt) {
    ExperimentData data;
    data.table = FeatureTable::read(required_path(opt, "features"));
    data.subjects = read_metadata(required_path(opt, "metadata"));
    const auto ef = opt.at("eval_features").get<std::string>();
    if (!ef.empty()) {
        data.eval_table = FeatureTable::read(ef);
        data.eval_subjects = read_metadata(required_path(opt, "eval_metadata"));
    }
    json exp = opt.at("experiment");
    if (!opt.at("seed").is_null()) exp["seed"] = opt.at("seed");
    if (!opt.at("evaluation").is_null()) exp["evaluation"] = opt.at("evaluation");
    const auto cfg = ExperimentConfig::from_json(exp);
    const auto dir = required_path(opt, "out_dir");
    const auto res = run_experiment_matrix(data, cfg, dir);
    json resolved = opt;
    resolved["experiment"] = cfg.to_json();
    echo_config(dir, "experiment", resolved);
    std::cout << "ran " << res.cells.size() << " cells";
    if (res.failed) std::cout << " (" << res.failed << " failed)";
    std::cout << "; metrics in " << (fs::path(dir) / "metrics.csv").string() << "\n";
    return res.failed ? kPartial : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Glioma overall-survival prognosis: feature extraction, feature selection, regression and evaluation.\n"
                 "Environment: GBMOS_WORKERS (worker threads), GBMOS_LOG (error|warn|info|debug)."};
    app.require_subcommand(1);

    struct Command {
        CLI::App* sub;
        std::unique_ptr<Options> opts;
        std::function<int(const json&)> run;
    };
    std::vector<Command> commands;
    const auto add = [&](const std::string& name, const std::string& help, json defaults, std::function<int(const json&)> run) -> Options& {
        auto* sub = app.add_subcommand(name, help);
        commands.push_back({sub, std::make_unique<Options>(sub, std::move(defaults)), std::move(run)});
        return *commands.back().opts;
    };

    {
        auto& o = add("phantom", "Generate phantom masks, scans and metadata from a JSON spec",
                      {{"spec", ""}, {"out_dir", ""}, {"channel", "synthetic"}, {"seed", nullptr}, {"write_images", true}}, cmd_phantom);
        o.text("--spec", "spec", "phantom spec: {\"phantoms\": [...]} and/or {\"cohort\": {...}}");
        o.text("--out-dir", "out_dir", "output directory");
        o.text("--channel", "channel", "channel name used in scan file names");
        o.count("--seed", "seed", "override the cohort / intensity seed");
        o.toggle("--no-images", "write_images", false, "skip NIfTI output (tables only)");
    }
    {
        auto& o = add("extract", "Extract image, mask-summary and radiomics features for every subject",
                      {{"metadata", ""},
                       {"data_dir", "."},
                       {"mask_pattern", "masks/{id}_seg.nii.gz"},
                       {"scan_pattern", "scans/{id}_{channel}.nii.gz"},
                       {"channel", ""},
                       {"radiomics", true},
                       {"roi", "WT"},
                       {"binning", "bin_count:32"},
                       {"gldm_alpha", 0},
                       {"smoothing_iterations", 20},
                       {"out_dir", ""}},
                      cmd_extract);
        o.text("--metadata", "metadata", "subject CSV (ID, Age, Survival_days, Extent_of_Resection)");
        o.text("--data-dir", "data_dir", "base directory for the file patterns");
        o.text("--mask-pattern", "mask_pattern", "segmentation path pattern, {id} is replaced");
        o.text("--scan-pattern", "scan_pattern", "scan path pattern, {id} and {channel} are replaced");
        o.text("--channel", "channel", "scan channel feeding intensity features (required with radiomics)");
        o.toggle("--no-radiomics", "radiomics", false, "image and mask-summary features only");
        o.text("--roi", "roi", "radiomics ROI: WT, TC, ET, label1, label2, label4");
        o.text("--binning", "binning", "bin_count:K or bin_width:W");
        o.integer("--gldm-alpha", "gldm_alpha", "GLDM dependence threshold");
        o.integer("--smoothing", "smoothing_iterations", "mesh smoothing iterations for shape features");
        o.text("--out-dir", "out_dir", "output directory (features.csv)");
    }
    {
        auto& o = add("rfe", "Recursive feature elimination",
                      {{"features", ""},
                       {"metadata", ""},
                       {"candidates", "radiomics107"},
                       {"n_keep", 20},
                       {"step", 1},
                       {"estimator", "rfr"},
                       {"params", json::object()},
                       {"seed", 1},
                       {"out_dir", ""}},
                      cmd_rfe);
        o.text("--features", "features", "feature CSV");
        o.text("--metadata", "metadata", "subject CSV");
        o.text("--candidates", "candidates", "radiomics107, all, or a comma-separated column list");
        o.count("--n-keep", "n_keep", "features to keep");
        o.count("--step", "step", "features dropped per iteration");
        o.text("--estimator", "estimator", "linear, rfr or gbr");
        o.structured("--params", "params", "estimator hyperparameters");
        o.count("--seed", "seed", "estimator seed");
        o.text("--out-dir", "out_dir", "output directory (ranking.csv, features_reduced.csv)");
    }
    {
        auto& o = add("train", "Train one predictor",
                      {{"features", ""},
                       {"metadata", ""},
                       {"predictor", "gbr"},
                       {"feature_set", "image7"},
                       {"ranking", ""},
                       {"params", json::object()},
                       {"grid", nullptr},
                       {"folds", 5},
                       {"seed", 1},
                       {"out_dir", ""}},
                      cmd_train);
        o.text("--features", "features", "feature CSV");
        o.text("--metadata", "metadata", "subject CSV");
        o.text("--predictor", "predictor", "linear, rfr, gbr or mlp");
        o.text("--feature-set", "feature_set", "image7, radiomics107, shape, all, or a comma-separated column list");
        o.text("--ranking", "ranking", "use the kept features of an RFE ranking CSV");
        o.structured("--params", "params", "hyperparameters");
        o.structured("--grid", "grid", "grid search: object of value arrays, or \"default\"");
        o.count("--folds", "folds", "cross-validation folds for grid search");
        o.count("--seed", "seed", "training seed");
        o.text("--out-dir", "out_dir", "output directory (model.json)");
    }
    {
        auto& o = add("predict", "Predict survival days with a saved model",
                      {{"model", ""}, {"features", ""}, {"out_dir", ""}}, cmd_predict);
        o.text("--model", "model", "model.json");
        o.text("--features", "features", "feature CSV");
        o.text("--out-dir", "out_dir", "output directory (predictions.csv)");
    }
    {
        auto& o = add("evaluate", "Score predictions against known survival",
                      {{"predictions", ""},
                       {"metadata", ""},
                       {"evaluation", "gtr"},
                       {"thresholds", thresholds_json({})},
                       {"dataset", "evaluate"},
                       {"feature_set", "NA"},
                       {"predictor", "NA"},
                       {"seed", nullptr},
                       {"out_dir", ""}},
                      cmd_evaluate);
        o.text("--predictions", "predictions", "CSV with ID, predicted_days");
        o.text("--metadata", "metadata", "subject CSV");
        o.toggle("--all", "evaluation", "all", "score every resection status (default: GTR only)");
        o.structured("--thresholds", "thresholds", "class thresholds {short_below, long_above} in days");
        o.text("--dataset", "dataset", "label for the dataset column");
        o.text("--feature-set", "feature_set", "label for the feature_set column");
        o.text("--predictor", "predictor", "label for the predictor column");
        o.count("--seed", "seed", "label for the seed column");
        o.text("--out-dir", "out_dir", "output directory (metrics.csv)");
    }
    {
        auto& o = add("experiment", "Run the feature-set x predictor matrix",
                      {{"features", ""},
                       {"metadata", ""},
                       {"eval_features", ""},
                       {"eval_metadata", ""},
                       {"experiment", json::object()},
                       {"seed", nullptr},
                       {"evaluation", nullptr},
                       {"out_dir", ""}},
                      cmd_experiment);
        o.text("--features", "features", "training feature CSV (all subject columns)");
        o.text("--metadata", "metadata", "training subject CSV");
        o.text("--eval-features", "eval_features", "separate evaluation feature CSV");
        o.text("--eval-metadata", "eval_metadata", "separate evaluation subject CSV");
        o.structured("--experiment", "experiment", "experiment settings (feature_sets, predictors, params, grids, rfe, ...)");
        o.count("--seed", "seed", "master seed");
        o.toggle("--all", "evaluation", "all", "evaluate on every resection status (default: GTR only)");
        o.text("--out-dir", "out_dir", "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    for (auto& c : commands) {
        if (!c.sub->parsed()) continue;
        try {
            return c.run(c.opts->resolve());
        } catch (const std::exception& e) {
            std::cerr << "gbmos " << c.sub->get_name() << ": " << e.what() << "\n";
            return 1;
        }
    }
    return 1;
}
