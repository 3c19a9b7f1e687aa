#include "cadmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <omp.h>

#include "cadmine/csv.hpp"

namespace cadmine {

ConfusionMatrix confusion(std::span<const uint8_t> predicted, std::span<const uint8_t> actual) {
    if (predicted.size() != actual.size())
        throw DataError(cat("confusion: length mismatch ", predicted.size(), " vs ", actual.size()));
    if (predicted.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (actual[i])
            predicted[i] ? ++m.f11 : ++m.f10;
        else
            predicted[i] ? ++m.f01 : ++m.f00;
    }
    return m;
}

double accuracy(const ConfusionMatrix& m) {
    if (m.total() == 0) throw UndefinedMetricError("accuracy undefined: no samples");
    return static_cast<double>(m.f00 + m.f11) / static_cast<double>(m.total());
}

double sensitivity(const ConfusionMatrix& m) {
    if (m.f11 + m.f10 == 0) throw UndefinedMetricError("sensitivity undefined: no positives");
    return static_cast<double>(m.f11) / static_cast<double>(m.f11 + m.f10);
}

double specificity(const ConfusionMatrix& m) {
    if (m.f00 + m.f01 == 0) throw UndefinedMetricError("specificity undefined: no negatives");
    return static_cast<double>(m.f00) / static_cast<double>(m.f00 + m.f01);
}

// Shared-term identities (fpr = 1 - specificity, tpr = sensitivity) are kept
// exact by construction rather than re-divided.
double fpr(const ConfusionMatrix& m) {
    if (m.f00 + m.f01 == 0) throw UndefinedMetricError("FPR undefined: no negatives");
    return 1.0 - specificity(m);
}

double tpr(const ConfusionMatrix& m) {
    return sensitivity(m);
}

RocCurve roc_auc(std::span<const double> scores, std::span<const uint8_t> actual) {
    if (scores.size() != actual.size())
        throw DataError(cat("roc: length mismatch ", scores.size(), " vs ", actual.size()));
    std::size_t pos = 0, neg = 0;
    for (uint8_t a : actual) a ? ++pos : ++neg;
    if (pos == 0 || neg == 0) throw DataError("roc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    double auc = 0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        // tied scores cross the threshold together
        double s = scores[order[i]];
        std::size_t tied_pos = 0, tied_neg = 0;
        while (i < order.size() && scores[order[i]] == s) {
            actual[order[i]] ? ++tied_pos : ++tied_neg;
            ++i;
        }
        double prev_fpr = static_cast<double>(fp) / neg;
        double prev_tpr = static_cast<double>(tp) / pos;
        tp += tied_pos;
        fp += tied_neg;
        double cur_fpr = static_cast<double>(fp) / neg;
        double cur_tpr = static_cast<double>(tp) / pos;
        auc += (cur_fpr - prev_fpr) * (prev_tpr + cur_tpr) / 2.0;
        curve.points.push_back({cur_fpr, cur_tpr});
    }
    if (curve.points.back().fpr != 1.0 || curve.points.back().tpr != 1.0)
        curve.points.push_back({1.0, 1.0});
    curve.auc = auc;
    return curve;
}

std::vector<FoldSplit> stratified_kfold(std::size_t n_records, std::span<const uint8_t> labels,
                                        int k, uint64_t seed) {
    if (labels.size() != n_records) throw DataError("stratified_kfold: label length mismatch");
    if (k < 2) throw DataError("stratified_kfold: k must be >= 2");

    if (static_cast<std::size_t>(k) > n_records)
        throw DataError(cat("stratified_kfold: k=", k, " exceeds ", n_records, " records"));
    std::vector<uint32_t> by_class[2];
    for (std::size_t i = 0; i < n_records; ++i)
        by_class[labels[i] ? 1 : 0].push_back(static_cast<uint32_t>(i));
    // k == n is leave-one-out, where per-class stratification degenerates
    if (static_cast<std::size_t>(k) < n_records)
        for (int c = 0; c < 2; ++c)
            if (!by_class[c].empty() && by_class[c].size() < static_cast<std::size_t>(k))
                throw DataError(cat("stratified_kfold: class ", c, " has ", by_class[c].size(),
                                    " members, fewer than k=", k));

    std::mt19937_64 rng(seed);
    std::vector<std::vector<uint32_t>> test_sets(k);
    // one dealing pointer shared across classes keeps overall fold sizes
    // within one of each other
    std::size_t next_fold = 0;
    for (int c = 0; c < 2; ++c) {
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        for (uint32_t idx : by_class[c]) {
            test_sets[next_fold].push_back(idx);
            next_fold = (next_fold + 1) % k;
        }
    }

    std::vector<FoldSplit> folds(k);
    for (int f = 0; f < k; ++f) {
        std::sort(test_sets[f].begin(), test_sets[f].end());
        std::vector<uint8_t> in_test(n_records, 0);
        for (uint32_t idx : test_sets[f]) in_test[idx] = 1;
        folds[f].test = std::move(test_sets[f]);
        folds[f].train.reserve(n_records - folds[f].test.size());
        for (std::size_t i = 0; i < n_records; ++i)
            if (!in_test[i]) folds[f].train.push_back(static_cast<uint32_t>(i));
    }
    return folds;
}

double entropy(std::span<const double> probs) {
    double sum = 0;
    for (double p : probs) {
        if (p < 0 || !std::isfinite(p)) throw DataError("entropy: probabilities must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError(cat("entropy: probabilities sum to ", sum));
    double h = 0;
    for (double p : probs)
        if (p > 0) h -= p * std::log2(p);
    return h;
}

double entropy_of_counts(uint64_t a, uint64_t b) {
    uint64_t n = a + b;
    if (n == 0) return 0;
    double h = 0;
    for (uint64_t c : {a, b}) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

double info_gain(const BitVector& feature_column, const BitVector& target) {
    if (feature_column.size() != target.size())
        throw DataError("info_gain: column length mismatch");
    const auto n = static_cast<uint64_t>(target.size());
    if (n == 0) throw DataError("info_gain: empty input");

    uint64_t t1 = target.count();
    uint64_t f1 = feature_column.count();
    uint64_t both = BitVector::and_count(feature_column, target);

    double parent = entropy_of_counts(t1, n - t1);
    // children: feature==1 and feature==0
    double h1 = entropy_of_counts(both, f1 - both);
    double h0 = entropy_of_counts(t1 - both, (n - f1) - (t1 - both));
    double nd = static_cast<double>(n);
    double gain = parent - (f1 / nd) * h1 - ((n - f1) / nd) * h0;
    return gain < 0 ? 0 : gain; // clamp -0 and rounding dust
}

std::vector<RankedFeature> rank_features(const AugmentedMatrix& data, std::size_t top_n,
                                         int threads) {
    const std::size_t width = data.n_features();
    std::vector<RankedFeature> all(width);
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(width); ++j)
        all[j] = {data.column_name(j), info_gain(data.column(j), data.base.target)};

    std::sort(all.begin(), all.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.gain != b.gain) return a.gain > b.gain;
        return a.name < b.name;
    });
    if (top_n && all.size() > top_n) all.resize(top_n);
    return all;
}

void write_roc_csv(const std::string& path, const RocCurve& roc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    out << "fpr,tpr\n";
    char buf[64];
    for (const auto& p : roc.points) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.fpr, p.tpr);
        out << buf;
    }
}

void write_ranking_csv(const std::string& path, const std::vector<RankedFeature>& ranking) {
    CsvTable table;
    table.header = {"rank", "feature", "info_gain"};
    char buf[32];
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", ranking[i].gain);
        table.rows.push_back({std::to_string(i + 1), ranking[i].name, buf});
    }
    write_csv(path, table);
}

void write_metric_report(const std::string& path, const MetricReport& r,
                         const std::vector<std::pair<std::string, std::string>>& context) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    char buf[128];
    for (const auto& [k, v] : context) out << k << " = " << v << '\n';
    out << "confusion.f11_tp = " << r.pooled.f11 << '\n';
    out << "confusion.f10_fn = " << r.pooled.f10 << '\n';
    out << "confusion.f01_fp = " << r.pooled.f01 << '\n';
    out << "confusion.f00_tn = " << r.pooled.f00 << '\n';
    auto emit = [&](const char* name, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.6f\n", name, v);
        out << buf;
    };
    emit("pooled.accuracy", r.accuracy);
    emit("pooled.sensitivity", r.sensitivity);
    emit("pooled.specificity", r.specificity);
    emit("pooled.fpr", r.fpr);
    emit("pooled.tpr", r.tpr);
    emit("pooled.auc", r.auc);
    emit("macro.accuracy", r.macro_accuracy);
    for (std::size_t f = 0; f < r.fold_accuracies.size(); ++f) {
        std::snprintf(buf, sizeof(buf), "fold.%zu.accuracy = %.6f\n", f + 1, r.fold_accuracies[f]);
        out << buf;
    }
    if (!out) throw DataError(cat("write failed: ", path));
}

} // namespace cadmine
