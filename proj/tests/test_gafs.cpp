#include <doctest.h>

#include <random>

#include "cadmine/gafs.hpp"

using namespace cadmine;

namespace {

// feature table with one target-copy column, optional planted columns
// (target with a given flip rate) and random noise columns
FeatureTable synthetic_table(std::size_t n, std::size_t noise_cols, std::size_t planted_cols,
                             double flip_rate, uint64_t seed, bool include_copy = false) {
    std::mt19937_64 rng(seed);
    FeatureTable t;
    t.labels.resize(n);
    for (std::size_t r = 0; r < n; ++r) t.labels[r] = (r % 2 == 0) ? 1 : 0; // balanced
    std::shuffle(t.labels.begin(), t.labels.end(), rng);

    std::vector<std::vector<uint8_t>> cols;
    if (include_copy) {
        std::vector<uint8_t> c(t.labels.begin(), t.labels.end());
        cols.push_back(c);
        t.names.push_back("copy");
    }
    std::bernoulli_distribution flip(flip_rate), coin(0.5);
    for (std::size_t p = 0; p < planted_cols; ++p) {
        std::vector<uint8_t> c(n);
        for (std::size_t r = 0; r < n; ++r) c[r] = flip(rng) ? 1 - t.labels[r] : t.labels[r];
        cols.push_back(c);
        t.names.push_back("planted" + std::to_string(p));
    }
    for (std::size_t j = 0; j < noise_cols; ++j) {
        std::vector<uint8_t> c(n);
        for (std::size_t r = 0; r < n; ++r) c[r] = coin(rng);
        cols.push_back(c);
        t.names.push_back("noise" + std::to_string(j));
    }
    t.width = cols.size();
    t.rows.assign(n, BitVector(t.width));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < t.width; ++j)
            if (cols[j][r]) t.rows[r].set(j);
    return t;
}

FeatureMask mask_of(std::initializer_list<int> bits) {
    FeatureMask m;
    m.bits = BitVector(bits.size());
    std::size_t i = 0;
    for (int b : bits) {
        if (b) m.bits.set(i);
        ++i;
    }
    return m;
}

} // namespace

TEST_SUITE("gafs") {

TEST_CASE("fitness of a target-copy column is perfect") {
    FeatureTable t = synthetic_table(60, 6, 0, 0, 11, true);
    BitVector mask(t.width);
    mask.set(0); // the copy column
    CHECK(ga_fitness(mask, t, SvmConfig{}, 5, 42) == doctest::Approx(1.0));
}

TEST_CASE("fitness over pure noise hovers near chance") {
    FeatureTable t = synthetic_table(400, 12, 0, 0, 7);
    BitVector mask(t.width, true);
    double f = ga_fitness(mask, t, SvmConfig{}, 5, 21);
    CHECK(f > 0.4);
    CHECK(f < 0.6);
}

TEST_CASE("fitness is deterministic for a fixed seed") {
    FeatureTable t = synthetic_table(80, 8, 1, 0.1, 3);
    BitVector mask(t.width, true);
    double a = ga_fitness(mask, t, SvmConfig{}, 4, 99);
    double b = ga_fitness(mask, t, SvmConfig{}, 4, 99);
    CHECK(a == b);
}

TEST_CASE("fitness rejects empty masks") {
    FeatureTable t = synthetic_table(40, 4, 0, 0, 5);
    CHECK_THROWS_AS(ga_fitness(BitVector(t.width), t, SvmConfig{}, 4, 1), DataError);
}

TEST_CASE("crossover") {
    std::mt19937_64 rng(8);
    SUBCASE("identical parents give identical children") {
        FeatureMask a = mask_of({1, 0, 1, 1, 0, 1});
        auto [c1, c2] = crossover(a, a, rng);
        CHECK(c1.bits == a.bits);
        CHECK(c2.bits == a.bits);
    }
    SUBCASE("complementary parents stay complementary per position") {
        FeatureMask a = mask_of({1, 1, 1, 1, 1, 1, 1, 1});
        FeatureMask b = mask_of({0, 0, 0, 0, 0, 0, 0, 0});
        auto [c1, c2] = crossover(a, b, rng);
        for (std::size_t i = 0; i < 8; ++i) CHECK((c1.bits.get(i) ^ c2.bits.get(i)));
    }
    SUBCASE("per-position material is conserved") {
        for (int trial = 0; trial < 30; ++trial) {
            FeatureMask a, b;
            a.bits = BitVector(32);
            b.bits = BitVector(32);
            for (int i = 0; i < 32; ++i) {
                if (rng() & 1) a.bits.set(i);
                if (rng() & 1) b.bits.set(i);
            }
            if (!a.bits.any()) a.bits.set(0);
            if (!b.bits.any()) b.bits.set(1);
            auto [c1, c2] = crossover(a, b, rng);
            for (int i = 0; i < 32; ++i) {
                bool parents_set = a.bits.get(i) + b.bits.get(i);
                bool children_set = c1.bits.get(i) + c2.bits.get(i);
                // repair may add a bit to an empty child, never remove one
                if (a.bits.count() + b.bits.count() > 2)
                    CHECK(parents_set == children_set);
            }
        }
    }
    SUBCASE("length mismatch throws") {
        FeatureMask a = mask_of({1, 0});
        FeatureMask b = mask_of({1, 0, 1});
        CHECK_THROWS_AS(crossover(a, b, rng), DataError);
    }
}

TEST_CASE("mutate") {
    std::mt19937_64 rng(9);
    FeatureMask m = mask_of({1, 0, 1, 0, 1, 0, 0, 1});
    SUBCASE("rate zero is the identity") {
        FeatureMask out = mutate(m, 0, rng);
        CHECK(out.bits == m.bits);
    }
    SUBCASE("rate one complements") {
        FeatureMask out = mutate(m, 1, rng);
        CHECK(out.bits == ~m.bits);
    }
    SUBCASE("rate one on an all-ones mask repairs to a single bit") {
        FeatureMask all = mask_of({1, 1, 1, 1});
        FeatureMask out = mutate(all, 1, rng);
        CHECK(out.bits.count() == 1);
    }
    SUBCASE("flip counts stay within four sigma of the binomial") {
        // rate 0.01 over 10000 bits: mean 100, sigma ~9.95
        FeatureMask wide;
        wide.bits = BitVector(10000);
        for (int i = 0; i < 10000; i += 3) wide.bits.set(i);
        for (int trial = 0; trial < 50; ++trial) {
            FeatureMask out = mutate(wide, 0.01, rng);
            std::size_t flips = (out.bits ^ wide.bits).count();
            CHECK(flips >= 100 - 40);
            CHECK(flips <= 100 + 40);
        }
    }
}

TEST_CASE("run_ga terminates, improves monotonically and reproduces") {
    FeatureTable t = synthetic_table(80, 20, 3, 0.05, 13);
    GaConfig cfg;
    cfg.population_size = 16;
    cfg.max_generations = 8;
    cfg.seed = 5;
    cfg.fitness_folds = 4;
    SvmConfig svm;

    GaResult r1 = run_ga(t, cfg, svm);
    CHECK(r1.history.size() <= 8);
    for (std::size_t g = 1; g < r1.history.size(); ++g)
        CHECK(r1.history[g].best_fitness >= r1.history[g - 1].best_fitness);
    CHECK(r1.best_mask.any());
    CHECK(r1.best_fitness > 0.5);

    GaResult r2 = run_ga(t, cfg, svm);
    CHECK(r1.best_mask == r2.best_mask);
    CHECK(r1.best_fitness == r2.best_fitness);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t g = 0; g < r1.history.size(); ++g) {
        CHECK(r1.history[g].best_fitness == r2.history[g].best_fitness);
        CHECK(r1.history[g].mean_fitness == r2.history[g].mean_fitness);
    }

    // serial and parallel evaluation agree bit for bit
    GaResult r3 = run_ga(t, cfg, svm, 1);
    CHECK(r1.best_mask == r3.best_mask);
    CHECK(r1.best_fitness == r3.best_fitness);
}

TEST_CASE("target fitness of zero stops after the first generation") {
    FeatureTable t = synthetic_table(40, 6, 0, 0, 3);
    GaConfig cfg;
    cfg.population_size = 6;
    cfg.max_generations = 50;
    cfg.target_fitness = 0.0;
    cfg.fitness_folds = 4;
    GaResult r = run_ga(t, cfg, SvmConfig{});
    CHECK(r.history.size() == 1);
}

TEST_CASE("cached fitness equals a fresh evaluation under the stored seed") {
    FeatureTable t = synthetic_table(60, 10, 2, 0.1, 17);
    GaConfig cfg;
    cfg.population_size = 10;
    cfg.max_generations = 6;
    cfg.seed = 2;
    cfg.fitness_folds = 4;
    SvmConfig svm;
    GaResult r = run_ga(t, cfg, svm);
    CHECK(r.cache_hits > 0); // elitism re-encounters genomes
    double fresh = ga_fitness(r.best_mask, t, svm, cfg.fitness_folds, r.best_fitness_seed);
    CHECK(fresh == r.best_fitness);
}

TEST_CASE("fitness errors inside the generation loop propagate") {
    FeatureTable t = synthetic_table(12, 4, 0, 0, 7);
    // collapse to a 2-member minority class: folds can no longer stratify
    int ones = 0;
    for (auto& l : t.labels)
        if (l && ++ones > 2) l = 0;
    GaConfig cfg;
    cfg.population_size = 4;
    cfg.max_generations = 2;
    cfg.fitness_folds = 4;
    CHECK_THROWS_AS(run_ga(t, cfg, SvmConfig{}), DataError);
}

TEST_CASE("ga recovers planted structure") {
    FeatureTable t = synthetic_table(100, 20, 3, 0.05, 23);
    GaConfig cfg;
    cfg.population_size = 20;
    cfg.max_generations = 12;
    cfg.seed = 4;
    cfg.fitness_folds = 4;
    cfg.target_fitness = 0.93;
    GaResult r = run_ga(t, cfg, SvmConfig{});
    CHECK(r.best_fitness >= 0.85);
    int planted_selected = 0;
    for (int p = 0; p < 3; ++p)
        if (r.best_mask.get(p)) ++planted_selected;
    CHECK(planted_selected >= 1);
}

} // TEST_SUITE gafs
