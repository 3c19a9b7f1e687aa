#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cadmine/bitvec.hpp"
#include "cadmine/miner.hpp"
#include "cadmine/svm.hpp"

namespace cadmine {

// GA chromosome: one bit per combined feature column. Never empty once
// evaluated (empty offspring are repaired). The cached fitness carries the
// seed it was computed under.
struct FeatureMask {
    BitVector bits;
    std::optional<double> fitness;
    uint64_t fitness_seed = 0;
};

struct GaConfig {
    int population_size = 50;
    double crossover_rate = 0.9;
    double mutation_rate = 0; // 0 = 1/chromosome_length per bit
    int elitism_count = 2;
    int max_generations = 100;
    std::optional<double> target_fitness;
    uint64_t seed = 0;
    int fitness_folds = 5;
    int tournament_size = 2;

    void validate() const;
};

// Mean accuracy of an SVM over stratified k-fold CV restricted to the masked
// columns. Pure function of (mask, table, config, folds, seed).
double ga_fitness(const BitVector& mask, const FeatureTable& table, const SvmConfig& svm_config,
                  int folds, uint64_t seed);

// Uniform crossover: each position independently swapped with probability
// one half; empty children get one random parent bit forced on.
std::pair<FeatureMask, FeatureMask> crossover(const FeatureMask& a, const FeatureMask& b,
                                              std::mt19937_64& rng);

// Independent per-bit flips; an all-zero result gets one random bit set.
FeatureMask mutate(const FeatureMask& m, double rate, std::mt19937_64& rng);

struct GaGeneration {
    int generation = 0;
    double best_fitness = 0;
    double mean_fitness = 0;
    std::size_t best_selected = 0;
};

struct GaResult {
    BitVector best_mask;
    double best_fitness = 0;
    uint64_t best_fitness_seed = 0; // seed the winning evaluation ran under
    std::vector<GaGeneration> history;
    std::size_t fitness_evaluations = 0;
    std::size_t cache_hits = 0;
};

// Tournament selection + uniform crossover + mutation + elitism. Fitness
// evaluations within a generation run in parallel; each individual's
// evaluation seed derives from (master seed, generation, index) so results
// do not depend on scheduling. Ties prefer fewer selected features.
GaResult run_ga(const FeatureTable& table, const GaConfig& ga_config, const SvmConfig& svm_config,
                int threads = 0);

void write_ga_history_csv(const std::string& path, const std::vector<GaGeneration>& history);

} // namespace cadmine
