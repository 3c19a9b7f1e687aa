#pragma once

#include <string>
#include <vector>

#include "cadmine/config.hpp"
#include "cadmine/eval.hpp"
#include "cadmine/gafs.hpp"
#include "cadmine/miner.hpp"
#include "cadmine/svm.hpp"

namespace cadmine {

struct PipelineConfig {
    std::string data_path;
    std::string config_path;
    std::string report_dir;
    MinerConfig miner;
    GaConfig ga;
    SvmConfig svm;
    int eval_folds = 10;
    uint64_t seed = 0;
    int threads = 0;
    bool nested_cv = false; // re-run the GA inside each outer fold
};

struct PipelineReport {
    std::size_t n_records = 0;
    std::size_t n_binary_features = 0;
    std::size_t n_itemsets = 0;
    std::size_t n_selected = 0;
    std::vector<std::string> selected_features;
    double ga_fitness = 0;
    MetricReport metrics;
    std::string manifest_path;
};

// k-fold CV of an SVM on the masked columns; pooled confusion/metrics plus
// a ROC over pooled decision values, per-fold breakdown included.
MetricReport cross_validated_metrics(const FeatureTable& table, const BitVector& mask,
                                     const SvmConfig& svm_config, int folds, uint64_t seed);

// discretize -> binarize -> mine -> inject -> GA select -> final k-fold
// evaluation. Emits per-stage artifacts into report_dir plus a manifest of
// every resolved parameter; aborts name the failing stage. Byte-identical
// outputs for identical config and seed.
PipelineReport run_pipeline(const PipelineConfig& config);

} // namespace cadmine
