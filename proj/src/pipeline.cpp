#include "cadmine/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace cadmine {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto result = f();
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::fprintf(stderr, "[cadmine] stage %-10s %6lld ms\n", name,
                     static_cast<long long>(ms));
        return result;
    } catch (const DataError& e) {
        throw DataError(cat("stage ", name, ": ", e.what()));
    } catch (const Error& e) {
        throw Error(cat("stage ", name, ": ", e.what()));
    } catch (const std::exception& e) {
        throw Error(cat("stage ", name, ": ", e.what()));
    }
}

uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t x = a ^ (b * 0x9e3779b97f4a7c15ull);
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

// k-fold CV of an SVM on the masked columns: per-fold confusion plus pooled
// metrics and a ROC over the pooled decision values (each record scored by
// the fold that held it out).
MetricReport cross_validated_metrics(const FeatureTable& table, const BitVector& mask,
                                     const SvmConfig& svm_config, int folds, uint64_t seed) {
    auto splits = stratified_kfold(table.rows.size(), table.labels, folds, seed);
    std::vector<double> scores(table.rows.size(), 0);
    std::vector<uint8_t> predicted(table.rows.size(), 0);

    MetricReport report;
    for (std::size_t f = 0; f < splits.size(); ++f) {
        std::vector<BitVector> train_rows;
        std::vector<int8_t> train_y;
        for (uint32_t idx : splits[f].train) {
            train_rows.push_back(table.rows[idx]);
            train_y.push_back(table.labels[idx] ? 1 : -1);
        }
        SvmModel model = train_svm(train_rows, train_y, svm_config, mask, mix(seed, f));
        std::vector<uint8_t> fold_pred, fold_actual;
        for (uint32_t idx : splits[f].test) {
            double s = decision_value(model, table.rows[idx]);
            scores[idx] = s;
            predicted[idx] = s >= 0 ? 1 : 0;
            fold_pred.push_back(predicted[idx]);
            fold_actual.push_back(table.labels[idx]);
        }
        ConfusionMatrix cm = confusion(fold_pred, fold_actual);
        report.fold_confusions.push_back(cm);
        report.fold_accuracies.push_back(accuracy(cm));
    }

    report.pooled = confusion(predicted, table.labels);
    report.accuracy = accuracy(report.pooled);
    report.sensitivity = sensitivity(report.pooled);
    report.specificity = specificity(report.pooled);
    report.fpr = fpr(report.pooled);
    report.tpr = tpr(report.pooled);
    report.roc = roc_auc(scores, table.labels);
    report.auc = report.roc.auc;
    double macro = 0;
    for (double a : report.fold_accuracies) macro += a;
    report.macro_accuracy = macro / static_cast<double>(report.fold_accuracies.size());
    return report;
}

PipelineReport run_pipeline(const PipelineConfig& config) {
    fs::create_directories(config.report_dir);
    auto path = [&](const char* name) { return (fs::path(config.report_dir) / name).string(); };

    DataConfig data_cfg = stage("config", [&] { return load_config(config.config_path); });
    RawDataset raw =
        stage("load", [&] { return load_dataset(config.data_path, data_cfg.features); });

    DiscretizedDataset disc = stage("discretize", [&] {
        auto d = discretize_dataset(raw, data_cfg.profiles, data_cfg.ranges);
        write_discretized_csv(path("discretized.csv"), d);
        return d;
    });

    BinaryMatrix binary = stage("binarize", [&] {
        auto m = binarize_dataset(disc, data_cfg);
        write_binary_csv(path("binary.csv"), m);
        return m;
    });

    std::vector<Itemset> itemsets = stage("mine", [&] {
        auto sets = mine_frequent_itemsets(binary, config.miner, config.threads);
        write_itemsets_csv(path("itemsets.csv"), sets, binary.feature_names);
        return sets;
    });

    AugmentedMatrix augmented = stage("inject", [&] {
        auto m = inject_features(binary, itemsets);
        write_augmented_csv(path("augmented.csv"), m);
        return m;
    });
    FeatureTable table = to_feature_table(augmented);

    PipelineReport report;
    report.n_records = binary.n_records;
    report.n_binary_features = binary.n_features();
    report.n_itemsets = itemsets.size();

    GaConfig ga_cfg = config.ga;
    ga_cfg.seed = mix(config.seed, 0xca);

    if (!config.nested_cv) {
        GaResult ga = stage("select", [&] {
            auto r = run_ga(table, ga_cfg, config.svm, config.threads);
            write_ga_history_csv(path("ga_history.csv"), r.history);
            return r;
        });
        report.ga_fitness = ga.best_fitness;
        report.n_selected = ga.best_mask.count();
        {
            std::ofstream out(path("selected_features.txt"), std::ios::binary);
            for (std::size_t j = 0; j < table.width; ++j)
                if (ga.best_mask.get(j)) out << table.names[j] << '\n';
        }
        report.selected_features.reserve(report.n_selected);
        for (std::size_t j = 0; j < table.width; ++j)
            if (ga.best_mask.get(j)) report.selected_features.push_back(table.names[j]);

        report.metrics = stage("evaluate", [&] {
            auto m = cross_validated_metrics(table, ga.best_mask, config.svm, config.eval_folds,
                                             mix(config.seed, 0xe7a1));
            write_metric_report(path("report.txt"), m,
                                {{"mode", "cv"},
                                 {"folds", std::to_string(config.eval_folds)},
                                 {"seed", std::to_string(config.seed)},
                                 {"kernel", to_string(config.svm.kernel)},
                                 {"C", fmt(config.svm.C)}});
            write_roc_csv(path("roc.csv"), m.roc);
            return m;
        });
    } else {
        // outer folds held out from selection entirely: the GA sees only the
        // training side of each split, metrics pool the untouched test sides
        report.metrics = stage("select+evaluate", [&] {
            auto splits = stratified_kfold(table.rows.size(), table.labels, config.eval_folds,
                                           mix(config.seed, 0xe7a1));
            std::vector<double> scores(table.rows.size(), 0);
            std::vector<uint8_t> predicted(table.rows.size(), 0);
            std::map<std::string, int> votes;
            MetricReport m;
            double fitness_sum = 0;
            for (std::size_t f = 0; f < splits.size(); ++f) {
                FeatureTable inner;
                inner.names = table.names;
                inner.width = table.width;
                for (uint32_t idx : splits[f].train) {
                    inner.rows.push_back(table.rows[idx]);
                    inner.labels.push_back(table.labels[idx]);
                }
                GaConfig fold_cfg = ga_cfg;
                fold_cfg.seed = mix(ga_cfg.seed, f);
                GaResult ga = run_ga(inner, fold_cfg, config.svm, config.threads);
                fitness_sum += ga.best_fitness;
                for (std::size_t j = 0; j < table.width; ++j)
                    if (ga.best_mask.get(j)) ++votes[table.names[j]];

                std::vector<int8_t> train_y;
                for (uint8_t l : inner.labels) train_y.push_back(l ? 1 : -1);
                SvmModel model =
                    train_svm(inner.rows, train_y, config.svm, ga.best_mask, mix(config.seed, f));
                std::vector<uint8_t> fold_pred, fold_actual;
                for (uint32_t idx : splits[f].test) {
                    double s = decision_value(model, table.rows[idx]);
                    scores[idx] = s;
                    predicted[idx] = s >= 0 ? 1 : 0;
                    fold_pred.push_back(predicted[idx]);
                    fold_actual.push_back(table.labels[idx]);
                }
                ConfusionMatrix cm = confusion(fold_pred, fold_actual);
                m.fold_confusions.push_back(cm);
                m.fold_accuracies.push_back(accuracy(cm));
            }
            m.pooled = confusion(predicted, table.labels);
            m.accuracy = accuracy(m.pooled);
            m.sensitivity = sensitivity(m.pooled);
            m.specificity = specificity(m.pooled);
            m.fpr = fpr(m.pooled);
            m.tpr = tpr(m.pooled);
            m.roc = roc_auc(scores, table.labels);
            m.auc = m.roc.auc;
            double macro = 0;
            for (double a : m.fold_accuracies) macro += a;
            m.macro_accuracy = macro / static_cast<double>(m.fold_accuracies.size());

            report.ga_fitness = fitness_sum / static_cast<double>(splits.size());
            std::ofstream out(path("selected_features.txt"), std::ios::binary);
            out << "# feature, folds selecting it (nested mode)\n";
            for (const auto& [name, n] : votes) {
                out << name << ", " << n << '\n';
                report.selected_features.push_back(name);
            }
            report.n_selected = votes.size();
            write_metric_report(path("report.txt"), m,
                                {{"mode", "nested-cv"},
                                 {"folds", std::to_string(config.eval_folds)},
                                 {"seed", std::to_string(config.seed)},
                                 {"kernel", to_string(config.svm.kernel)},
                                 {"C", fmt(config.svm.C)}});
            write_roc_csv(path("roc.csv"), m.roc);
            return m;
        });
    }

    // manifest: every resolved parameter and headline result, fixed order,
    // nothing time- or host-dependent
    {
        std::ofstream out(path("manifest.txt"), std::ios::binary);
        if (!out) throw DataError(cat("cannot write manifest: ", path("manifest.txt")));
        out << "cadmine.pipeline = v1\n";
        out << "input.data = " << config.data_path << '\n';
        out << "input.config = " << config.config_path << '\n';
        out << "seed = " << config.seed << '\n';
        out << "records = " << report.n_records << '\n';
        out << "binary.features = " << report.n_binary_features << '\n';
        out << "miner.min_sup = " << fmt(config.miner.min_sup) << '\n';
        out << "miner.max_k = " << config.miner.max_k << '\n';
        out << "miner.extracted_itemsets = " << report.n_itemsets << '\n';
        out << "ga.population = " << ga_cfg.population_size << '\n';
        out << "ga.generations = " << ga_cfg.max_generations << '\n';
        out << "ga.crossover_rate = " << fmt(ga_cfg.crossover_rate) << '\n';
        double mut = ga_cfg.mutation_rate > 0 ? ga_cfg.mutation_rate
                                              : 1.0 / static_cast<double>(table.width);
        out << "ga.mutation_rate = " << fmt(mut) << '\n';
        out << "ga.elitism = " << ga_cfg.elitism_count << '\n';
        out << "ga.fitness_folds = " << ga_cfg.fitness_folds << '\n';
        out << "ga.tournament = " << ga_cfg.tournament_size << '\n';
        out << "svm.kernel = " << to_string(config.svm.kernel) << '\n';
        out << "svm.C = " << fmt(config.svm.C) << '\n';
        out << "svm.gamma = " << (config.svm.gamma > 0 ? fmt(config.svm.gamma) : "auto") << '\n';
        out << "svm.tol = " << fmt(config.svm.tol) << '\n';
        out << "svm.max_passes = " << config.svm.max_passes << '\n';
        out << "eval.folds = " << config.eval_folds << '\n';
        out << "eval.mode = " << (config.nested_cv ? "nested-cv" : "cv") << '\n';
        out << "selected.features = " << report.n_selected << '\n';
        out << "selection.fitness = " << fmt(report.ga_fitness) << '\n';
        out << "metrics.pooled.accuracy = " << fmt(report.metrics.accuracy) << '\n';
        out << "metrics.pooled.sensitivity = " << fmt(report.metrics.sensitivity) << '\n';
        out << "metrics.pooled.specificity = " << fmt(report.metrics.specificity) << '\n';
        out << "metrics.pooled.auc = " << fmt(report.metrics.auc) << '\n';
        out << "metrics.macro.accuracy = " << fmt(report.metrics.macro_accuracy) << '\n';
        report.manifest_path = path("manifest.txt");
    }
    return report;
}

} // namespace cadmine
