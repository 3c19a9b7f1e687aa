// Command-line front end: each subcommand wraps one pipeline stage, `run`
// chains them all. Standard output carries requested tables only; progress
// and timings go to standard error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "cadmine/binarize.hpp"
#include "cadmine/config.hpp"
#include "cadmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cadmine;

namespace {

struct SvmOpts {
    std::string kernel = "rbf";
    SvmConfig cfg;

    SvmConfig resolve() const {
        SvmConfig out = cfg;
        out.kernel = kernel_from_string(kernel);
        return out;
    }
};

void add_svm_opts(CLI::App* cmd, SvmOpts& o) {
    cmd->add_option("--kernel", o.kernel, "kernel: linear|polynomial|rbf|sigmoid (default rbf)");
    cmd->add_option("--C", o.cfg.C, "soft-margin penalty (default 1)");
    cmd->add_option("--gamma", o.cfg.gamma, "kernel gamma (default 1/feature count)");
    cmd->add_option("--degree", o.cfg.degree, "polynomial degree (default 3)");
    cmd->add_option("--coef0", o.cfg.coef0, "polynomial/sigmoid constant (default 0)");
    cmd->add_option("--svm-tol", o.cfg.tol, "KKT tolerance (default 1e-3)");
    cmd->add_option("--max-passes", o.cfg.max_passes, "cap on SMO sweeps (default 200)");
}

struct GaOpts {
    GaConfig cfg;
    double target_fitness = -1;

    GaConfig resolve() const {
        GaConfig out = cfg;
        if (target_fitness >= 0) out.target_fitness = target_fitness;
        return out;
    }
};

void add_ga_opts(CLI::App* cmd, GaOpts& o) {
    cmd->add_option("--population", o.cfg.population_size, "GA population size (default 50)");
    cmd->add_option("--generations", o.cfg.max_generations, "GA generation cap (default 100)");
    cmd->add_option("--crossover-rate", o.cfg.crossover_rate, "crossover probability (default 0.9)");
    cmd->add_option("--mutation-rate", o.cfg.mutation_rate,
                    "per-bit mutation probability (default 1/length)");
    cmd->add_option("--elitism", o.cfg.elitism_count, "elites carried over (default 2)");
    cmd->add_option("--fitness-folds", o.cfg.fitness_folds, "CV folds inside fitness (default 5)");
    cmd->add_option("--tournament", o.cfg.tournament_size, "tournament size (default 2)");
    cmd->add_option("--target-fitness", o.target_fitness, "stop once best fitness reaches this");
}

std::vector<double> parse_min_sups(const std::string& arg) {
    std::vector<double> values;
    std::string token;
    std::istringstream ss(arg);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw UsageError(cat("--min-sups: bad value '", token, "'"));
        }
        if (used != token.size()) throw UsageError(cat("--min-sups: bad value '", token, "'"));
        values.push_back(v);
    }
    if (values.empty()) throw UsageError("--min-sups: no values given");
    return values;
}

BitVector mask_from_feature_file(const std::string& path, const FeatureTable& table) {
    std::ifstream in(path);
    if (!in) throw DataError(cat("cannot open feature list: ", path));
    BitVector mask(table.width);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto it = std::find(table.names.begin(), table.names.end(), line);
        if (it == table.names.end())
            throw DataError(cat(path, ": feature '", line, "' not in input matrix"));
        mask.set(static_cast<std::size_t>(it - table.names.begin()));
        ++n;
    }
    if (n == 0) throw DataError(cat(path, ": no features listed"));
    return mask;
}

MetricReport pooled_only_report(std::span<const double> scores, std::span<const uint8_t> predicted,
                                std::span<const uint8_t> actual) {
    MetricReport rep;
    rep.pooled = confusion(predicted, actual);
    rep.accuracy = accuracy(rep.pooled);
    rep.sensitivity = sensitivity(rep.pooled);
    rep.specificity = specificity(rep.pooled);
    rep.fpr = fpr(rep.pooled);
    rep.tpr = tpr(rep.pooled);
    rep.roc = roc_auc(scores, actual);
    rep.auc = rep.roc.auc;
    rep.macro_accuracy = rep.accuracy;
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"profile-based itemset feature extraction and GA+SVM diagnosis pipeline"};
    app.require_subcommand(1);

    // discretize
    auto* disc = app.add_subcommand("discretize", "discretize numerics against profile ranges");
    std::string disc_config, disc_data, disc_out;
    disc->add_option("--config", disc_config, "schema/profiles/ranges config file")->required();
    disc->add_option("--data", disc_data, "input CSV")->required();
    disc->add_option("--out", disc_out, "output CSV")->required();

    // binarize
    auto* bin = app.add_subcommand("binarize", "produce the 0/1 transaction matrix");
    std::string bin_config, bin_data, bin_out;
    bin->add_option("--config", bin_config, "schema/profiles/ranges config file")->required();
    bin->add_option("--data", bin_data, "input CSV")->required();
    bin->add_option("--out", bin_out, "output CSV")->required();

    // mine
    auto* mine = app.add_subcommand("mine", "extract frequent itemsets");
    std::string mine_input, mine_out, mine_aug_out;
    MinerConfig miner_cfg;
    int mine_threads = 0;
    mine->add_option("--input", mine_input, "binary matrix CSV (target last)")->required();
    mine->add_option("--min-sup", miner_cfg.min_sup, "minimum support in (0,1)")->required();
    mine->add_option("--max-k", miner_cfg.max_k, "cap on itemset size (0 = none)");
    mine->add_option("--out", mine_out, "itemset table CSV")->required();
    mine->add_option("--augmented-out", mine_aug_out, "augmented matrix CSV");
    mine->add_option("--threads", mine_threads, "worker threads (0 = all cores)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "itemset counts over a min_sup list");
    std::string sweep_input, sweep_values, sweep_out;
    int sweep_threads = 0;
    sweep->add_option("--input", sweep_input, "binary matrix CSV")->required();
    sweep->add_option("--min-sups", sweep_values, "comma-separated min_sup values")->required();
    sweep->add_option("--out", sweep_out, "write counts as CSV");
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = all cores)");

    // rank
    auto* rank = app.add_subcommand("rank", "information-gain feature ranking");
    std::string rank_input, rank_out;
    std::size_t rank_top = 20;
    int rank_threads = 0;
    rank->add_option("--input", rank_input, "0/1 matrix CSV (base or augmented)")->required();
    rank->add_option("--top", rank_top, "how many features to report (default 20)");
    rank->add_option("--out", rank_out, "write ranking as CSV");
    rank->add_option("--threads", rank_threads, "worker threads (0 = all cores)");

    // select
    auto* select = app.add_subcommand("select", "GA feature selection with SVM fitness");
    std::string select_input, select_outdir;
    GaOpts select_ga;
    SvmOpts select_svm;
    uint64_t select_seed = 0;
    int select_threads = 0;
    select->add_option("--input", select_input, "0/1 matrix CSV (usually augmented)")->required();
    select->add_option("--out-dir", select_outdir, "output directory")->required();
    add_ga_opts(select, select_ga);
    add_svm_opts(select, select_svm);
    select->add_option("--seed", select_seed, "master random seed");
    select->add_option("--threads", select_threads, "worker threads (0 = all cores)");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a saved model or run k-fold CV");
    std::string eval_input, eval_model, eval_features, eval_report, eval_roc, eval_save_model;
    int eval_folds = 10;
    SvmOpts eval_svm;
    uint64_t eval_seed = 0;
    eval_cmd->add_option("--input", eval_input, "0/1 matrix CSV")->required();
    eval_cmd->add_option("--model", eval_model, "saved model file (direct scoring mode)");
    eval_cmd->add_option("--features", eval_features, "feature-name list restricting the columns");
    eval_cmd->add_option("--folds", eval_folds, "CV folds (default 10)");
    eval_cmd->add_option("--report", eval_report, "metric report file")->required();
    eval_cmd->add_option("--roc", eval_roc, "ROC points CSV");
    eval_cmd->add_option("--save-model", eval_save_model, "save the model trained on all records");
    add_svm_opts(eval_cmd, eval_svm);
    eval_cmd->add_option("--seed", eval_seed, "master random seed");

    // run
    auto* run = app.add_subcommand("run", "full pipeline: discretize through evaluation");
    PipelineConfig pipe;
    GaOpts run_ga_opts;
    SvmOpts run_svm_opts;
    run->add_option("--config", pipe.config_path, "schema/profiles/ranges config file")->required();
    run->add_option("--data", pipe.data_path, "input CSV")->required();
    run->add_option("--out-dir", pipe.report_dir, "report directory")->required();
    run->add_option("--min-sup", pipe.miner.min_sup, "minimum support (default 0.1)");
    run->add_option("--max-k", pipe.miner.max_k, "cap on itemset size (0 = none)");
    run->add_option("--eval-folds", pipe.eval_folds, "final CV folds (default 10)");
    run->add_flag("--nested-cv", pipe.nested_cv, "re-run the GA inside each outer fold");
    add_ga_opts(run, run_ga_opts);
    add_svm_opts(run, run_svm_opts);
    run->add_option("--seed", pipe.seed, "master random seed");
    run->add_option("--threads", pipe.threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (disc->parsed()) {
            DataConfig cfg = load_config(disc_config);
            RawDataset raw = load_dataset(disc_data, cfg.features);
            DiscretizedDataset d = discretize_dataset(raw, cfg.profiles, cfg.ranges);
            write_discretized_csv(disc_out, d);
            std::fprintf(stderr, "[cadmine] discretized %zu records -> %s\n", d.n_records,
                         disc_out.c_str());
            return 0;
        }

        if (bin->parsed()) {
            DataConfig cfg = load_config(bin_config);
            RawDataset raw = load_dataset(bin_data, cfg.features);
            DiscretizedDataset d = discretize_dataset(raw, cfg.profiles, cfg.ranges);
            BinaryMatrix m = binarize_dataset(d, cfg);
            write_binary_csv(bin_out, m);
            std::fprintf(stderr, "[cadmine] %zu binary features + target, %zu records -> %s\n",
                         m.n_features(), m.n_records, bin_out.c_str());
            return 0;
        }

        if (mine->parsed()) {
            BinaryMatrix m = read_binary_csv(mine_input);
            auto itemsets = mine_frequent_itemsets(m, miner_cfg, mine_threads);
            write_itemsets_csv(mine_out, itemsets, m.feature_names);
            if (!mine_aug_out.empty())
                write_augmented_csv(mine_aug_out, inject_features(m, itemsets));
            std::fprintf(stderr, "[cadmine] %zu frequent itemsets at min_sup %g -> %s\n",
                         itemsets.size(), miner_cfg.min_sup, mine_out.c_str());
            return 0;
        }

        if (sweep->parsed()) {
            BinaryMatrix m = read_binary_csv(sweep_input);
            auto counts = sweep_min_sup(m, parse_min_sups(sweep_values), sweep_threads);
            std::printf("min_sup,extracted_features\n");
            for (const auto& [v, n] : counts) std::printf("%g,%zu\n", v, n);
            if (!sweep_out.empty()) {
                std::ofstream out(sweep_out, std::ios::binary);
                out << "min_sup,extracted_features\n";
                for (const auto& [v, n] : counts) out << v << ',' << n << '\n';
            }
            return 0;
        }

        if (rank->parsed()) {
            BinaryMatrix m = read_binary_csv(rank_input);
            AugmentedMatrix aug = inject_features(m, {});
            auto ranking = rank_features(aug, rank_top, rank_threads);
            std::printf("rank,feature,info_gain\n");
            for (std::size_t i = 0; i < ranking.size(); ++i)
                std::printf("%zu,%s,%.6f\n", i + 1, ranking[i].name.c_str(), ranking[i].gain);
            if (!rank_out.empty()) write_ranking_csv(rank_out, ranking);
            return 0;
        }

        if (select->parsed()) {
            BinaryMatrix m = read_binary_csv(select_input);
            FeatureTable table = to_feature_table(m);
            GaConfig ga_cfg = select_ga.resolve();
            ga_cfg.seed = select_seed;
            fs::create_directories(select_outdir);
            GaResult ga = run_ga(table, ga_cfg, select_svm.resolve(), select_threads);
            write_ga_history_csv((fs::path(select_outdir) / "ga_history.csv").string(), ga.history);
            std::ofstream out((fs::path(select_outdir) / "selected_features.txt").string(),
                              std::ios::binary);
            for (std::size_t j = 0; j < table.width; ++j)
                if (ga.best_mask.get(j)) out << table.names[j] << '\n';
            std::fprintf(stderr,
                         "[cadmine] best fitness %.4f with %zu features "
                         "(%zu evaluations, %zu cache hits)\n",
                         ga.best_fitness, ga.best_mask.count(), ga.fitness_evaluations,
                         ga.cache_hits);
            return 0;
        }

        if (eval_cmd->parsed()) {
            if (!eval_model.empty() && !eval_features.empty())
                throw UsageError("--model scores as saved; it cannot be combined with --features");
            if (!eval_model.empty() && !eval_save_model.empty())
                throw UsageError("--model and --save-model are mutually exclusive");
            BinaryMatrix m = read_binary_csv(eval_input);
            FeatureTable table = to_feature_table(m);
            if (!eval_model.empty()) {
                SvmModel model = load_model(eval_model);
                std::vector<int> cols;
                for (const auto& name : model.active_names) {
                    int c = m.column_index(name);
                    if (c < 0) throw DataError(cat("input lacks model feature '", name, "'"));
                    cols.push_back(c);
                }
                std::vector<double> scores(m.n_records);
                std::vector<uint8_t> predicted(m.n_records);
                for (std::size_t r = 0; r < m.n_records; ++r) {
                    BitVector x(model.width);
                    for (std::size_t j = 0; j < cols.size(); ++j)
                        if (m.columns[cols[j]].get(r)) x.set(j);
                    scores[r] = decision_value(model, x);
                    predicted[r] = scores[r] >= 0 ? 1 : 0;
                }
                MetricReport rep = pooled_only_report(scores, predicted, table.labels);
                write_metric_report(eval_report, rep, {{"mode", "model"}, {"model", eval_model}});
                if (!eval_roc.empty()) write_roc_csv(eval_roc, rep.roc);
                std::fprintf(stderr, "[cadmine] accuracy %.4f auc %.4f -> %s\n", rep.accuracy,
                             rep.auc, eval_report.c_str());
                return 0;
            }
            BitVector mask = eval_features.empty() ? BitVector(table.width, true)
                                                   : mask_from_feature_file(eval_features, table);
            SvmConfig svm_cfg = eval_svm.resolve();
            MetricReport rep = cross_validated_metrics(table, mask, svm_cfg, eval_folds, eval_seed);
            write_metric_report(eval_report, rep,
                                {{"mode", "cv"}, {"folds", std::to_string(eval_folds)}});
            if (!eval_roc.empty()) write_roc_csv(eval_roc, rep.roc);
            if (!eval_save_model.empty()) {
                std::vector<int8_t> y;
                y.reserve(table.labels.size());
                for (uint8_t l : table.labels) y.push_back(l ? 1 : -1);
                SvmModel model = train_svm(table.rows, y, svm_cfg, mask, eval_seed, table.names);
                save_model(eval_save_model, model);
            }
            std::fprintf(stderr, "[cadmine] pooled accuracy %.4f auc %.4f -> %s\n", rep.accuracy,
                         rep.auc, eval_report.c_str());
            return 0;
        }

        if (run->parsed()) {
            pipe.ga = run_ga_opts.resolve();
            pipe.svm = run_svm_opts.resolve();
            PipelineReport rep = run_pipeline(pipe);
            std::fprintf(stderr,
                         "[cadmine] pipeline done: %zu itemsets, %zu selected, "
                         "accuracy %.4f, auc %.4f\n",
                         rep.n_itemsets, rep.n_selected, rep.metrics.accuracy, rep.metrics.auc);
            std::printf("%s\n", rep.manifest_path.c_str());
            return 0;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
