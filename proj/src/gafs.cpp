#include "cadmine/gafs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <omp.h>

#include "cadmine/eval.hpp"

namespace cadmine {

void GaConfig::validate() const {
    if (population_size < 2) throw DataError("ga: population_size must be >= 2");
    if (crossover_rate < 0 || crossover_rate > 1) throw DataError("ga: crossover_rate must be in [0,1]");
    if (mutation_rate < 0 || mutation_rate > 1) throw DataError("ga: mutation_rate must be in [0,1]");
    if (elitism_count < 0 || elitism_count >= population_size)
        throw DataError("ga: elitism_count must be in [0, population_size)");
    if (max_generations < 1) throw DataError("ga: max_generations must be >= 1");
    if (fitness_folds < 2) throw DataError("ga: fitness_folds must be >= 2");
    if (tournament_size < 1) throw DataError("ga: tournament_size must be >= 1");
}

namespace {

// splitmix64: spreads (seed, generation, index) into independent streams
uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
    uint64_t x = a ^ (b * 0x9e3779b97f4a7c15ull) ^ (c * 0xbf58476d1ce4e5b9ull);
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

BitVector random_mask(std::size_t len, std::mt19937_64& rng) {
    BitVector bits(len);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < len; ++i)
        if (coin(rng)) bits.set(i);
    return bits;
}

void repair_if_empty(BitVector& bits, std::mt19937_64& rng) {
    if (!bits.any() && bits.size() > 0) bits.set(rng() % bits.size());
}

// empty child gets one bit drawn from the parents' combined material
void repair_from_pool(BitVector& bits, const BitVector& pool, std::mt19937_64& rng) {
    if (bits.any() || bits.size() == 0) return;
    std::size_t n = pool.count();
    if (n == 0) {
        repair_if_empty(bits, rng);
        return;
    }
    std::size_t pick = rng() % n;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (pool.get(i) && pick-- == 0) {
            bits.set(i);
            return;
        }
}

} // namespace

double ga_fitness(const BitVector& mask, const FeatureTable& table, const SvmConfig& svm_config,
                  int folds, uint64_t seed) {
    if (!mask.any()) throw DataError("ga_fitness: empty feature mask");
    if (mask.size() != table.width) throw DataError("ga_fitness: mask width mismatch");

    auto splits = stratified_kfold(table.rows.size(), table.labels, folds, seed);
    double acc_sum = 0;
    for (std::size_t f = 0; f < splits.size(); ++f) {
        std::vector<BitVector> train_rows;
        std::vector<int8_t> train_y;
        train_rows.reserve(splits[f].train.size());
        train_y.reserve(splits[f].train.size());
        for (uint32_t idx : splits[f].train) {
            train_rows.push_back(table.rows[idx]);
            train_y.push_back(table.labels[idx] ? 1 : -1);
        }
        SvmModel model = train_svm(train_rows, train_y, svm_config, mask,
                                   mix_seed(seed, 0xf01d, f));
        std::size_t correct = 0;
        for (uint32_t idx : splits[f].test)
            if (predict(model, table.rows[idx]) == (table.labels[idx] != 0)) ++correct;
        acc_sum += static_cast<double>(correct) / static_cast<double>(splits[f].test.size());
    }
    return acc_sum / static_cast<double>(splits.size());
}

std::pair<FeatureMask, FeatureMask> crossover(const FeatureMask& a, const FeatureMask& b,
                                              std::mt19937_64& rng) {
    if (a.bits.size() != b.bits.size()) throw DataError("crossover: length mismatch");
    FeatureMask c1{a.bits, {}, 0};
    FeatureMask c2{b.bits, {}, 0};
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (coin(rng)) {
            bool x = c1.bits.get(i);
            c1.bits.set(i, c2.bits.get(i));
            c2.bits.set(i, x);
        }
    }
    BitVector pool = a.bits | b.bits;
    repair_from_pool(c1.bits, pool, rng);
    repair_from_pool(c2.bits, pool, rng);
    return {std::move(c1), std::move(c2)};
}

FeatureMask mutate(const FeatureMask& m, double rate, std::mt19937_64& rng) {
    if (rate < 0 || rate > 1) throw DataError("mutate: rate must be in [0,1]");
    FeatureMask out{m.bits, {}, 0};
    if (rate > 0) {
        std::bernoulli_distribution coin(rate);
        for (std::size_t i = 0; i < out.bits.size(); ++i)
            if (coin(rng)) out.bits.flip(i);
    } else {
        out.fitness = m.fitness; // untouched genome keeps its cached score
        out.fitness_seed = m.fitness_seed;
    }
    repair_if_empty(out.bits, rng);
    return out;
}

GaResult run_ga(const FeatureTable& table, const GaConfig& ga_config, const SvmConfig& svm_config,
                int threads) {
    ga_config.validate();
    const std::size_t len = table.width;
    if (len == 0) throw DataError("run_ga: no feature columns");
    const double mutation_rate =
        ga_config.mutation_rate > 0 ? ga_config.mutation_rate : 1.0 / static_cast<double>(len);
    const int nt = threads > 0 ? threads : omp_get_max_threads();

    std::mt19937_64 rng(ga_config.seed);

    // initial population: random half-density masks plus the all-features mask
    std::vector<FeatureMask> population;
    population.reserve(ga_config.population_size);
    population.push_back({BitVector(len, true), {}, 0});
    for (int i = 1; i < ga_config.population_size; ++i) {
        BitVector bits = random_mask(len, rng);
        repair_if_empty(bits, rng);
        population.push_back({std::move(bits), {}, 0});
    }

    // fitness cache keyed by genome; stores the value and the seed it was
    // computed under
    struct CacheEntry {
        double fitness;
        uint64_t seed;
    };
    std::unordered_map<uint64_t, std::vector<std::pair<BitVector, CacheEntry>>> cache;
    auto cache_find = [&](const BitVector& bits) -> const CacheEntry* {
        auto it = cache.find(bits.hash());
        if (it == cache.end()) return nullptr;
        for (const auto& [k, v] : it->second)
            if (k == bits) return &v;
        return nullptr;
    };

    GaResult result;
    result.best_fitness = -1;

    // ties prefer fewer selected features
    auto better = [](double fa, std::size_t ca, double fb, std::size_t cb) {
        if (fa != fb) return fa > fb;
        return ca < cb;
    };

    for (int gen = 0; gen < ga_config.max_generations; ++gen) {
        // evaluate: cache hits first (serial), then the misses in parallel
        std::vector<int> pending;
        for (int i = 0; i < ga_config.population_size; ++i) {
            auto& ind = population[i];
            if (ind.fitness) continue;
            if (const CacheEntry* e = cache_find(ind.bits)) {
                ind.fitness = e->fitness;
                ind.fitness_seed = e->seed;
                ++result.cache_hits;
            } else {
                ind.fitness_seed = mix_seed(ga_config.seed, static_cast<uint64_t>(gen) + 1,
                                            static_cast<uint64_t>(i));
                pending.push_back(i);
            }
        }
        std::exception_ptr fitness_error;
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pending.size()); ++p) {
            try {
                auto& ind = population[pending[p]];
                ind.fitness = ga_fitness(ind.bits, table, svm_config, ga_config.fitness_folds,
                                         ind.fitness_seed);
            } catch (...) {
#pragma omp critical
                if (!fitness_error) fitness_error = std::current_exception();
            }
        }
        if (fitness_error) std::rethrow_exception(fitness_error);
        result.fitness_evaluations += pending.size();
        for (int i : pending)
            cache[population[i].bits.hash()].push_back(
                {population[i].bits, {*population[i].fitness, population[i].fitness_seed}});

        // rank for elitism and stats
        std::vector<int> order(ga_config.population_size);
        for (int i = 0; i < ga_config.population_size; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double fa = *population[a].fitness, fb = *population[b].fitness;
            std::size_t ca = population[a].bits.count(), cb = population[b].bits.count();
            if (fa != fb) return fa > fb;
            if (ca != cb) return ca < cb;
            return a < b;
        });

        const FeatureMask& gen_best = population[order[0]];
        if (result.best_fitness < 0 ||
            better(*gen_best.fitness, gen_best.bits.count(), result.best_fitness,
                   result.best_mask.count())) {
            result.best_fitness = *gen_best.fitness;
            result.best_mask = gen_best.bits;
            result.best_fitness_seed = gen_best.fitness_seed;
        }
        double mean = 0;
        for (const auto& ind : population) mean += *ind.fitness;
        mean /= static_cast<double>(ga_config.population_size);
        result.history.push_back(
            {gen + 1, result.best_fitness, mean, result.best_mask.count()});

        if (ga_config.target_fitness && result.best_fitness >= *ga_config.target_fitness) break;
        if (gen + 1 == ga_config.max_generations) break;

        // next generation: elites carried over, rest from tournament +
        // crossover + mutation
        std::vector<FeatureMask> next;
        next.reserve(ga_config.population_size);
        for (int e = 0; e < ga_config.elitism_count; ++e) next.push_back(population[order[e]]);

        auto tournament = [&]() -> const FeatureMask& {
            int best = static_cast<int>(rng() % ga_config.population_size);
            for (int t = 1; t < ga_config.tournament_size; ++t) {
                int ch = static_cast<int>(rng() % ga_config.population_size);
                if (better(*population[ch].fitness, population[ch].bits.count(),
                           *population[best].fitness, population[best].bits.count()))
                    best = ch;
            }
            return population[best];
        };
        std::bernoulli_distribution do_cross(ga_config.crossover_rate);
        while (static_cast<int>(next.size()) < ga_config.population_size) {
            const FeatureMask& p1 = tournament();
            const FeatureMask& p2 = tournament();
            FeatureMask c1 = p1, c2 = p2;
            if (do_cross(rng)) std::tie(c1, c2) = crossover(p1, p2, rng);
            c1 = mutate(c1, mutation_rate, rng);
            c2 = mutate(c2, mutation_rate, rng);
            next.push_back(std::move(c1));
            if (static_cast<int>(next.size()) < ga_config.population_size)
                next.push_back(std::move(c2));
        }
        population = std::move(next);
    }
    return result;
}

void write_ga_history_csv(const std::string& path, const std::vector<GaGeneration>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    out << "generation,best_fitness,mean_fitness,best_selected\n";
    char buf[128];
    for (const auto& g : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%zu\n", g.generation, g.best_fitness,
                      g.mean_fitness, g.best_selected);
        out << buf;
    }
}

} // namespace cadmine
