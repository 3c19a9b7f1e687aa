// Serial reference vs OpenMP kernels: itemset support counting, GA fitness
// evaluation and info-gain ranking. Run with --benchmark_filter=... to pick.

#include <random>

#include <benchmark/benchmark.h>

#include "cadmine/eval.hpp"
#include "cadmine/gafs.hpp"
#include "cadmine/miner.hpp"

using namespace cadmine;

namespace {

BinaryMatrix make_matrix(std::size_t rows, std::size_t cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    BinaryMatrix m;
    m.n_records = rows;
    m.target = BitVector(rows);
    m.target_name = "y";
    std::bernoulli_distribution bit(0.45);
    for (std::size_t c = 0; c < cols; ++c) {
        BitVector col(rows);
        for (std::size_t r = 0; r < rows; ++r)
            if (bit(rng)) col.set(r);
        m.feature_names.push_back("f" + std::to_string(c));
        m.columns.push_back(std::move(col));
    }
    for (std::size_t r = 0; r < rows; ++r)
        if (rng() & 1) m.target.set(r);
    return m;
}

std::vector<std::vector<uint32_t>> make_candidates(std::size_t cols, std::size_t count,
                                                   uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<uint32_t>> cands;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t k = 2 + rng() % 3;
        std::vector<uint32_t> items;
        while (items.size() < k) {
            uint32_t j = rng() % cols;
            if (std::find(items.begin(), items.end(), j) == items.end()) items.push_back(j);
        }
        std::sort(items.begin(), items.end());
        cands.push_back(std::move(items));
    }
    return cands;
}

void bm_support_counts_serial(benchmark::State& state) {
    BinaryMatrix m = make_matrix(4096, 48, 1);
    auto cands = make_candidates(48, state.range(0), 2);
    for (auto _ : state) {
        auto counts = count_supports_serial(m.columns, cands, m.n_records);
        benchmark::DoNotOptimize(counts);
    }
}

void bm_support_counts_omp(benchmark::State& state) {
    BinaryMatrix m = make_matrix(4096, 48, 1);
    auto cands = make_candidates(48, state.range(0), 2);
    for (auto _ : state) {
        auto counts = count_supports(m.columns, cands, static_cast<int>(state.range(1)));
        benchmark::DoNotOptimize(counts);
    }
}

void bm_mine(benchmark::State& state) {
    BinaryMatrix m = make_matrix(512, 40, 3);
    MinerConfig cfg{static_cast<double>(state.range(0)) / 100.0, 0};
    for (auto _ : state) {
        auto sets = mine_frequent_itemsets(m, cfg, static_cast<int>(state.range(1)));
        benchmark::DoNotOptimize(sets);
    }
}

FeatureTable fitness_table(std::size_t rows, std::size_t cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    FeatureTable t;
    t.width = cols;
    t.labels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) t.labels[r] = r % 2;
    std::shuffle(t.labels.begin(), t.labels.end(), rng);
    t.rows.assign(rows, BitVector(cols));
    std::bernoulli_distribution flip(0.2), coin(0.5);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) {
            bool v = j < 4 ? (flip(rng) ? !t.labels[r] : t.labels[r]) : coin(rng);
            if (v) t.rows[r].set(j);
        }
        t.names.push_back("f");
    }
    return t;
}

void bm_ga_generation(benchmark::State& state) {
    FeatureTable t = fitness_table(200, 60, 5);
    GaConfig cfg;
    cfg.population_size = 16;
    cfg.max_generations = 1;
    cfg.fitness_folds = 5;
    cfg.seed = 9;
    for (auto _ : state) {
        GaResult r = run_ga(t, cfg, SvmConfig{}, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(r);
    }
}

void bm_rank_features(benchmark::State& state) {
    BinaryMatrix m = make_matrix(2048, 256, 7);
    AugmentedMatrix aug = inject_features(m, {});
    for (auto _ : state) {
        auto ranking = rank_features(aug, 20, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(ranking);
    }
}

} // namespace

BENCHMARK(bm_support_counts_serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_support_counts_omp)
    ->Args({2000, 1})
    ->Args({2000, 2})
    ->Args({2000, 4})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mine)->Args({15, 1})->Args({15, 2})->Args({15, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ga_generation)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_rank_features)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
