#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cadmine/pipeline.hpp"

using namespace cadmine;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineConfig small_config(const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.data_path = std::string(CADMINE_DATA_DIR) + "/sample.csv";
    cfg.config_path = std::string(CADMINE_DATA_DIR) + "/zalizadeh.profiles";
    cfg.report_dir = out_dir;
    cfg.miner.min_sup = 0.35;
    cfg.ga.population_size = 10;
    cfg.ga.max_generations = 4;
    cfg.ga.fitness_folds = 4;
    cfg.eval_folds = 5;
    cfg.seed = 11;
    return cfg;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("pipeline emits every stage artifact plus a manifest") {
    fs::path dir = fs::temp_directory_path() / "cadmine_pipe_artifacts";
    fs::remove_all(dir);
    PipelineReport rep = run_pipeline(small_config(dir.string()));

    for (const char* name : {"discretized.csv", "binary.csv", "itemsets.csv", "augmented.csv",
                             "selected_features.txt", "ga_history.csv", "report.txt", "roc.csv",
                             "manifest.txt"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir / name));
    }
    CHECK(rep.n_records == 180);
    CHECK(rep.n_binary_features == 49);
    CHECK(rep.n_itemsets > 0);
    CHECK(rep.n_selected > 0);
    CHECK(rep.metrics.accuracy > 0.5);

    std::string manifest = slurp(dir / "manifest.txt");
    for (const char* key :
         {"seed = 11", "records = 180", "binary.features = 49", "miner.extracted_itemsets =",
          "metrics.pooled.auc =", "selected.features ="}) {
        CAPTURE(key);
        CHECK(manifest.find(key) != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    fs::path d1 = fs::temp_directory_path() / "cadmine_pipe_det1";
    fs::path d2 = fs::temp_directory_path() / "cadmine_pipe_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    run_pipeline(small_config(d1.string()));
    run_pipeline(small_config(d2.string()));
    for (const char* name : {"manifest.txt", "itemsets.csv", "selected_features.txt",
                             "ga_history.csv", "report.txt", "roc.csv"}) {
        CAPTURE(name);
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("stage artifacts are individually re-consumable") {
    fs::path dir = fs::temp_directory_path() / "cadmine_pipe_reuse";
    fs::remove_all(dir);
    PipelineConfig cfg = small_config(dir.string());
    PipelineReport rep = run_pipeline(cfg);

    // mining the emitted binary matrix reproduces the pipeline's itemsets
    BinaryMatrix m = read_binary_csv((dir / "binary.csv").string());
    auto itemsets = mine_frequent_itemsets(m, cfg.miner);
    CHECK(itemsets.size() == rep.n_itemsets);
    fs::path again = dir / "itemsets_again.csv";
    write_itemsets_csv(again.string(), itemsets, m.feature_names);
    CHECK(slurp(again) == slurp(dir / "itemsets.csv"));
    fs::remove_all(dir);
}

TEST_CASE("a bad config path aborts in the config stage") {
    PipelineConfig cfg = small_config((fs::temp_directory_path() / "cadmine_pipe_err").string());
    cfg.config_path = "/nonexistent/ranges.json";
    try {
        run_pipeline(cfg);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("stage config") != std::string::npos);
        CHECK(msg.find("/nonexistent/ranges.json") != std::string::npos);
    }
}

TEST_CASE("a config whose ranges omit a numeric feature fails fast") {
    // strip the EF range from the fixture
    std::string text = slurp(fs::path(CADMINE_DATA_DIR) / "zalizadeh.profiles");
    auto pos = text.find("{\"feature\": \"EF\"");
    REQUIRE(pos != std::string::npos);
    auto end = text.find('\n', pos);
    std::string broken = text.substr(0, pos) + text.substr(end + 1);
    // drop the trailing comma of the previous entry
    auto comma = broken.rfind(',', pos);
    broken[comma] = ' ';

    fs::path bad = fs::temp_directory_path() / "cadmine_broken.profiles";
    {
        std::ofstream out(bad);
        out << broken;
    }
    PipelineConfig cfg = small_config((fs::temp_directory_path() / "cadmine_pipe_err2").string());
    cfg.config_path = bad.string();
    try {
        run_pipeline(cfg);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("stage config") != std::string::npos);
        CHECK(msg.find("EF") != std::string::npos);
    }
    fs::remove(bad);
}

TEST_CASE("nested mode trains the selector only on outer-train data") {
    fs::path dir = fs::temp_directory_path() / "cadmine_pipe_nested";
    fs::remove_all(dir);
    PipelineConfig cfg = small_config(dir.string());
    cfg.nested_cv = true;
    cfg.ga.population_size = 6;
    cfg.ga.max_generations = 2;
    cfg.eval_folds = 4;
    PipelineReport rep = run_pipeline(cfg);
    CHECK(rep.metrics.fold_accuracies.size() == 4);
    CHECK(rep.n_selected > 0);
    std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("eval.mode = nested-cv") != std::string::npos);
    fs::remove_all(dir);
}

} // TEST_SUITE pipeline
