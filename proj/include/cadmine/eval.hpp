#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cadmine/bitvec.hpp"
#include "cadmine/miner.hpp"

namespace cadmine {

// f11 TP, f10 FN, f01 FP, f00 TN.
struct ConfusionMatrix {
    uint64_t f11 = 0;
    uint64_t f10 = 0;
    uint64_t f01 = 0;
    uint64_t f00 = 0;

    uint64_t total() const { return f11 + f10 + f01 + f00; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        f11 += o.f11;
        f10 += o.f10;
        f01 += o.f01;
        f00 += o.f00;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const uint8_t> predicted, std::span<const uint8_t> actual);

// All throw UndefinedMetricError on a zero denominator.
double accuracy(const ConfusionMatrix& m);
double sensitivity(const ConfusionMatrix& m);
double specificity(const ConfusionMatrix& m);
double fpr(const ConfusionMatrix& m);
double tpr(const ConfusionMatrix& m);

struct RocPoint {
    double fpr = 0;
    double tpr = 0;
};
struct RocCurve {
    std::vector<RocPoint> points; // starts at (0,0), ends at (1,1)
    double auc = 0;
};

// Threshold sweep over distinct scores descending, tied scores grouped;
// AUC by the trapezoid rule (equals the Mann-Whitney statistic with ties
// counted one half).
RocCurve roc_auc(std::span<const double> scores, std::span<const uint8_t> actual);

struct FoldSplit {
    std::vector<uint32_t> train;
    std::vector<uint32_t> test;
};

// Deterministic stratified folds: test sets partition all indices, per-fold
// class counts within one record of the even split.
std::vector<FoldSplit> stratified_kfold(std::size_t n_records, std::span<const uint8_t> labels,
                                        int k, uint64_t seed);

// Shannon entropy in bits; distribution must sum to 1 within 1e-9.
double entropy(std::span<const double> probs);
double entropy_of_counts(uint64_t a, uint64_t b);

// Information gain of a binary split against a binary target.
double info_gain(const BitVector& feature_column, const BitVector& target);

struct RankedFeature {
    std::string name;
    double gain = 0;
};

// Info gain per combined column, descending, ties broken by name.
std::vector<RankedFeature> rank_features(const AugmentedMatrix& data, std::size_t top_n,
                                         int threads = 0);

struct MetricReport {
    ConfusionMatrix pooled;
    double accuracy = 0;
    double sensitivity = 0;
    double specificity = 0;
    double fpr = 0;
    double tpr = 0;
    double auc = 0;
    RocCurve roc;
    std::vector<ConfusionMatrix> fold_confusions;
    std::vector<double> fold_accuracies;
    double macro_accuracy = 0; // mean of per-fold accuracies
};

void write_metric_report(const std::string& path, const MetricReport& r,
                         const std::vector<std::pair<std::string, std::string>>& context);
void write_roc_csv(const std::string& path, const RocCurve& roc);
void write_ranking_csv(const std::string& path, const std::vector<RankedFeature>& ranking);

} // namespace cadmine
