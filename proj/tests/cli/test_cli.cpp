// Drives the gbmos binary end to end through the shell.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/phantoms/phantom.hpp"
#include "gbmos/imagefeat/imagefeat.hpp"
#include "gbmos/regressors/model.hpp"
#include "gbmos/volumeio/nifti.hpp"
#include "oracles/rank_oracle.hpp"

using namespace gbmos;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("gbmos_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        if (!HasFailure()) fs::remove_all(dir_);
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(GBMOS_CLI) + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" +
                                (dir_ / "stderr.txt").string();
        const int st = std::system(cmd.c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    }

    std::string path(const std::string& rel) const { return (dir_ / rel).string(); }

    void put(const std::string& rel, const std::string& text) const {
        fs::create_directories((dir_ / rel).parent_path());
        std::ofstream(dir_ / rel) << text;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string err() const { return slurp(dir_ / "stderr.txt"); }

    fs::path dir_;
};

const char* kSphereSpec = R"({"phantoms": [
  {"id": "A", "dims": [24,24,24], "age": 50, "survival_days": 100, "resection": "GTR",
   "layers": [{"shape": "sphere", "radius": 7, "center": [11.5,11.5,11.5], "label": 2},
              {"shape": "sphere", "radius": 4, "center": [11.5,11.5,11.5], "label": 1},
              {"shape": "sphere", "radius": 2, "center": [11.5,11.5,11.5], "label": 4}]},
  {"id": "B", "dims": [24,24,24], "spacing": [1, 1, 2], "age": 70, "survival_days": 500, "resection": "STR",
   "layers": [{"shape": "cuboid", "size": [6,4,4], "center": [10,10,6], "label": 2},
              {"shape": "cuboid", "size": [2,2,2], "center": [10,10,6], "label": 1}]},
  {"id": "C", "dims": [24,24,24], "age": 30, "survival_days": 400, "resection": "NA",
   "layers": [{"shape": "ellipsoid", "axes": [8,5,4], "center": [12,12,12], "label": 2},
              {"shape": "sphere", "radius": 3, "center": [12,12,12], "label": 4}]}]})";

std::string dump_csv(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_F(Cli, PhantomFilesFeedExtractAndMatchAnalyticVolumes) {
    put("spec.json", kSphereSpec);
    ASSERT_EQ(run("phantom --spec " + path("spec.json") + " --out-dir " + path("ph") + " --channel t1ce"), 0) << err();
    ASSERT_EQ(run("extract --metadata " + path("ph/metadata.csv") + " --data-dir " + path("ph") + " --no-radiomics --out-dir " +
                  path("ex")),
              0)
        << err();
    const auto t = FeatureTable::read(path("ex/features.csv"));
    ASSERT_EQ(t.rows(), 3u);
    EXPECT_EQ(t.names.size(), 19u); // image7 + 12 mask summary

    // Volumes equal voxel count times spacing of the mask written to disk,
    // and the digitized sphere sits within 5% of 4/3 pi r^3.
    const auto mask_b = nifti::load_mask(path("ph/masks/B_seg.nii.gz"));
    const auto vwt = *t.column("img.vol_wt");
    EXPECT_EQ(t.row(1)[vwt], roi_volume(derive_roi(mask_b, RoiKind::WT)));
    EXPECT_EQ(t.row(1)[vwt], 6.0 * 4 * 4); // mm, z spacing 2
    EXPECT_NEAR(t.row(0)[vwt], 4.0 / 3.0 * M_PI * 343, 0.05 * 4.0 / 3.0 * M_PI * 343);
    EXPECT_EQ(t.row(0)[*t.column("meta.age")], 50.0);

    // Same inputs, same bytes.
    ASSERT_EQ(run("extract --metadata " + path("ph/metadata.csv") + " --data-dir " + path("ph") + " --no-radiomics --out-dir " +
                  path("ex2")),
              0);
    EXPECT_EQ(dump_csv(path("ex/features.csv")), dump_csv(path("ex2/features.csv")));

    const auto cfg = nlohmann::json::parse(slurp(dir_ / "ex/run_config.json"));
    EXPECT_EQ(cfg.at("command"), "extract");
    EXPECT_EQ(cfg.at("options").at("radiomics"), false);
    EXPECT_TRUE(cfg.at("schemas").contains("model"));
}

TEST_F(Cli, RadiomicsExtractionSkipsSubjectsWithEmptyRoi) {
    put("spec.json", kSphereSpec);
    ASSERT_EQ(run("phantom --spec " + path("spec.json") + " --out-dir " + path("ph") + " --channel t1ce"), 0) << err();
    // B has no enhancing tumor.
    EXPECT_EQ(run("extract --metadata " + path("ph/metadata.csv") + " --data-dir " + path("ph") +
                  " --channel t1ce --roi ET --smoothing 0 --out-dir " + path("ex")),
              2);
    EXPECT_NE(err().find("subject B skipped"), std::string::npos) << err();
    const auto t = FeatureTable::read(path("ex/features.csv"));
    EXPECT_EQ(t.ids, (std::vector<std::string>{"A", "C"}));
    EXPECT_EQ(t.names.size(), 19u + 107u);

    // Radiomics without a channel is a configuration error.
    EXPECT_EQ(run("extract --metadata " + path("ph/metadata.csv") + " --data-dir " + path("ph") + " --out-dir " + path("ex3")), 1);
    EXPECT_NE(err().find("channel"), std::string::npos);

    // Nothing extractable: nonzero exit and no table.
    put("only_b.csv", "ID,Age,Survival_days,Extent_of_Resection\nB,70,500,STR\n");
    EXPECT_EQ(run("extract --metadata " + path("only_b.csv") + " --data-dir " + path("ph") + " --channel t1ce --roi ET --out-dir " +
                  path("ex4")),
              1);
    EXPECT_FALSE(fs::exists(path("ex4/features.csv")));
}

TEST_F(Cli, EvaluateFourRowFileMatchesOracle) {
    put("pred.csv", "ID,predicted_days\nP1,120\nP2,300\nP3,650\nP4,350\n");
    put("meta.csv", "ID,Age,Survival_days,Extent_of_Resection\nP1,50,100,GTR\nP2,50,400,GTR\nP3,50,600,GTR\nP4,50,300,GTR\n");
    ASSERT_EQ(run("evaluate --predictions " + path("pred.csv") + " --metadata " + path("meta.csv") + " --out-dir " + path("ev")), 0)
        << err();
    const auto t = csv::read(path("ev/metrics.csv"));
    ASSERT_EQ(t.rows.size(), 1u);
    const auto get = [&](const std::string& c) { return *csv::parse_real(t.rows[0][t.require_column(c)]); };

    // Direct computation from the four pairs.
    const std::vector<double> pred{120, 300, 650, 350}, truth{100, 400, 600, 300};
    std::vector<double> se;
    for (int i = 0; i < 4; ++i) se.push_back((pred[i] - truth[i]) * (pred[i] - truth[i]));
    double mse = 0;
    for (double s : se) mse += s / 4;
    double var = 0;
    for (double s : se) var += (s - mse) * (s - mse) / 4;
    auto sorted = se;
    std::sort(sorted.begin(), sorted.end());
    const double rel = 1e-11;
    EXPECT_EQ(get("accuracy"), 0.5); // classes: s/s, i/s, l/l, s/i
    EXPECT_NEAR(get("mse"), mse, rel * mse);
    EXPECT_NEAR(get("median_se"), (sorted[1] + sorted[2]) / 2, rel * 2500);
    EXPECT_NEAR(get("std_se"), std::sqrt(var), rel * std::sqrt(var));
    EXPECT_NEAR(get("spearman_r"), static_cast<double>(oracle::spearman(pred, truth)), 1e-11);
    EXPECT_EQ(t.rows[0][t.require_column("n")], "4");
    EXPECT_EQ(t.rows[0][t.require_column("thresholds")], "304.375|456.5625");

    // GTR filter drops the non-GTR row; --all keeps it.
    put("meta2.csv", "ID,Age,Survival_days,Extent_of_Resection\nP1,50,100,GTR\nP2,50,400,STR\nP3,50,600,GTR\nP4,50,300,GTR\n");
    ASSERT_EQ(run("evaluate --predictions " + path("pred.csv") + " --metadata " + path("meta2.csv") + " --out-dir " + path("ev2")), 0);
    EXPECT_EQ(csv::read(path("ev2/metrics.csv")).rows[0][t.require_column("n")], "3");
    ASSERT_EQ(run("evaluate --all --predictions " + path("pred.csv") + " --metadata " + path("meta2.csv") + " --out-dir " +
                  path("ev3")),
              0);
    EXPECT_EQ(csv::read(path("ev3/metrics.csv")).rows[0][t.require_column("n")], "4");
}

TEST_F(Cli, TrainThenPredictReproducesTrainingTargets) {
    // A single unbootstrapped deep tree memorizes distinct rows.
    std::string feats = "ID,a,b\n", meta = "ID,Age,Survival_days,Extent_of_Resection\n";
    Rng rng(5);
    std::vector<double> y;
    for (int i = 0; i < 30; ++i) {
        const std::string id = "S" + std::to_string(i);
        feats += id + "," + csv::format_real(rng.uniform(0, 10)) + "," + csv::format_real(rng.uniform(-1, 1)) + "\n";
        y.push_back(std::round(rng.uniform(50, 900)));
        meta += id + ",60," + csv::format_real(y.back()) + ",GTR\n";
    }
    put("f.csv", feats);
    put("m.csv", meta);
    ASSERT_EQ(run("train --features " + path("f.csv") + " --metadata " + path("m.csv") +
                  " --predictor rfr --feature-set a,b --params '{\"n_trees\":1,\"bootstrap\":false,\"max_features\":2}' --out-dir " +
                  path("tr")),
              0)
        << err();
    ASSERT_EQ(run("predict --model " + path("tr/model.json") + " --features " + path("f.csv") + " --out-dir " + path("pr")), 0) << err();
    const auto p = csv::read(path("pr/predictions.csv"));
    ASSERT_EQ(p.rows.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) {
        EXPECT_EQ(p.rows[i][0], "S" + std::to_string(i));
        EXPECT_EQ(*csv::parse_real(p.rows[i][1]), y[i]);
    }

    // The saved model predicts exactly what the library does with it.
    const auto model = TrainedModel::load(path("tr/model.json"));
    EXPECT_EQ(model.features, (std::vector<std::string>{"a", "b"}));

    // Grid search leaves a report; bad params are rejected with context.
    ASSERT_EQ(run("train --features " + path("f.csv") + " --metadata " + path("m.csv") +
                  " --predictor linear --feature-set a,b --grid '{\"lambda\":[0.1,1]}' --params '{\"penalty\":\"l2\"}' --folds 3 --out-dir " +
                  path("tr2")),
              0)
        << err();
    const auto grid = nlohmann::json::parse(slurp(dir_ / "tr2/grid.json"));
    EXPECT_EQ(grid.at("cells").size(), 2u);
    EXPECT_EQ(run("train --features " + path("f.csv") + " --metadata " + path("m.csv") +
                  " --predictor rfr --feature-set a,b --params '{\"trees\":3}' --out-dir " + path("tr3")),
              1);
    EXPECT_NE(err().find("trees"), std::string::npos) << err();
}

TEST_F(Cli, ConfigFileIsOverriddenByFlagsAndEchoed) {
    put("pred.csv", "ID,predicted_days\nP1,120\nP2,300\nP3,650\n");
    put("meta.csv", "ID,Age,Survival_days,Extent_of_Resection\nP1,50,100,GTR\nP2,50,400,STR\nP3,50,600,GTR\n");
    put("cfg.json", R"({"evaluation": "all", "dataset": "fromfile", "thresholds": {"short_below": 200, "long_above": 500}})");
    ASSERT_EQ(run("evaluate --config " + path("cfg.json") + " --dataset fromflag --predictions " + path("pred.csv") + " --metadata " +
                  path("meta.csv") + " --out-dir " + path("ev")),
              0)
        << err();
    const auto t = csv::read(path("ev/metrics.csv"));
    EXPECT_EQ(t.rows[0][t.require_column("dataset")], "fromflag:eval_all");
    EXPECT_EQ(t.rows[0][t.require_column("thresholds")], "200|500");
    const auto echoed = nlohmann::json::parse(slurp(dir_ / "ev/run_config.json"));
    EXPECT_EQ(echoed.at("options").at("dataset"), "fromflag");
    EXPECT_EQ(echoed.at("options").at("evaluation"), "all");
    EXPECT_EQ(echoed.at("schema"), "gbmos.run_config/1");

    put("bad.json", R"({"evaluaton": "all"})");
    EXPECT_EQ(run("evaluate --config " + path("bad.json") + " --predictions " + path("pred.csv") + " --metadata " + path("meta.csv") +
                  " --out-dir " + path("ev2")),
              1);
    EXPECT_NE(err().find("unknown option 'evaluaton'"), std::string::npos) << err();
    EXPECT_NE(run("frobnicate"), 0);
}

TEST_F(Cli, CohortRfeAndExperimentMatrix) {
    put("spec.json", R"({"cohort": {"n_subjects": 50, "seed": 11, "phantom": {"dims": [24,24,24], "min_radius": 4, "max_radius": 9},
      "link": {"intercept": 900, "coefficients": [["meta.age", -6], ["img.vol_wt", -0.02]], "noise_sd": 0},
      "class_mix": [0.34, 0.33, 0.33]}})");
    ASSERT_EQ(run("phantom --spec " + path("spec.json") + " --out-dir " + path("ph") + " --channel flair"), 0) << err();
    const auto seeded = dump_csv(path("ph/metadata.csv"));
    ASSERT_EQ(run("phantom --spec " + path("spec.json") + " --out-dir " + path("ph_again") + " --channel flair --no-images"), 0);
    EXPECT_EQ(dump_csv(path("ph_again/metadata.csv")), seeded);

    ASSERT_EQ(run("extract --metadata " + path("ph/metadata.csv") + " --data-dir " + path("ph") + " --channel flair --smoothing 5 --out-dir " +
                  path("ex")),
              0)
        << err();

    ASSERT_EQ(run("rfe --features " + path("ex/features.csv") + " --metadata " + path("ph/metadata.csv") +
                  " --n-keep 20 --step 10 --params '{\"n_trees\":10}' --out-dir " + path("rfe")),
              0)
        << err();
    const auto ranking = csv::read(path("rfe/ranking.csv"));
    EXPECT_EQ(ranking.rows.size(), 107u);
    EXPECT_EQ(FeatureTable::read(path("rfe/features_reduced.csv")).names.size(), 20u);

    put("exp.json", R"({"experiment": {"grids": {"mlp": null, "linear": null, "gbr": null, "rfr": null},
      "params": {"mlp": {"epochs": 20}, "linear": {"penalty": "l2"}, "gbr": {"n_estimators": 20}, "rfr": {"n_trees": 10}},
      "rfe": {"estimator": {"predictor": "rfr", "params": {"n_trees": 10}}, "step": 10}}})");
    const std::string exp = "experiment --config " + path("exp.json") + " --features " + path("ex/features.csv") + " --metadata " +
                            path("ph/metadata.csv") + " --seed 3 --out-dir ";
    ASSERT_EQ(run(exp + path("x1")), 0) << err();
    const auto m = csv::read(path("x1/metrics.csv"));
    EXPECT_EQ(m.rows.size(), 16u);
    ASSERT_EQ(run(exp + path("x2")), 0) << err();
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir_ / "x1")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir_ / "x1");
        const auto other = dir_ / "x2" / rel;
        // run_config echoes the output path, everything else must match bytes.
        if (rel == "run_config.json") continue;
        EXPECT_EQ(slurp(e.path()), slurp(other)) << rel;
        ++files;
    }
    EXPECT_EQ(files, 19u); // 16 cells x model.json + metrics, train metrics, ranking
}
