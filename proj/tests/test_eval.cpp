#include <doctest.h>

#include <random>

#include "cadmine/eval.hpp"
#include "oracles.hpp"

using namespace cadmine;

TEST_SUITE("eval") {

TEST_CASE("confusion counts per cell") {
    SUBCASE("perfect prediction") {
        std::vector<uint8_t> a{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
        ConfusionMatrix m = confusion(a, a);
        CHECK(m == ConfusionMatrix{10, 0, 0, 5});
    }
    SUBCASE("hand count of the four cases") {
        std::vector<uint8_t> pred{1, 1, 0, 0}, act{1, 0, 1, 0};
        CHECK(confusion(pred, act) == ConfusionMatrix{1, 1, 1, 1});
    }
    SUBCASE("flipping predictions swaps the matrix diagonals") {
        std::mt19937_64 rng(2);
        std::vector<uint8_t> pred(40), act(40), flipped(40);
        for (int i = 0; i < 40; ++i) {
            pred[i] = rng() & 1;
            act[i] = rng() & 1;
            flipped[i] = 1 - pred[i];
        }
        ConfusionMatrix m = confusion(pred, act), f = confusion(flipped, act);
        CHECK(f.f11 == m.f10);
        CHECK(f.f10 == m.f11);
        CHECK(f.f01 == m.f00);
        CHECK(f.f00 == m.f01);
    }
    SUBCASE("errors") {
        std::vector<uint8_t> a{1}, b{1, 0};
        CHECK_THROWS_AS(confusion(a, b), DataError);
        CHECK_THROWS_AS(confusion({}, {}), DataError);
    }
}

TEST_CASE("metric formulas") {
    ConfusionMatrix best{216, 0, 5, 82}; // 303 records, 5 false positives
    CHECK(accuracy(best) * 100 == doctest::Approx(98.35).epsilon(0.0001));
    CHECK(sensitivity(best) * 100 == doctest::Approx(100.0));
    CHECK(specificity(best) * 100 == doctest::Approx(94.25).epsilon(0.0001));

    ConfusionMatrix perfect{7, 0, 0, 3};
    CHECK(accuracy(perfect) == 1.0);
    CHECK(sensitivity(perfect) == 1.0);
    CHECK(specificity(perfect) == 1.0);

    ConfusionMatrix uniform{1, 1, 1, 1};
    CHECK(accuracy(uniform) == 0.5);
    CHECK(sensitivity(uniform) == 0.5);
    CHECK(specificity(uniform) == 0.5);
    CHECK(fpr(uniform) == 0.5);
    CHECK(tpr(uniform) == 0.5);
}

TEST_CASE("metric identities and undefined denominators") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        ConfusionMatrix m{rng() % 20 + 1, rng() % 20, rng() % 20, rng() % 20 + 1};
        CHECK(tpr(m) == sensitivity(m));
        CHECK(fpr(m) == 1.0 - specificity(m));
    }
    ConfusionMatrix no_pos{0, 0, 3, 4};
    CHECK_THROWS_AS(sensitivity(no_pos), UndefinedMetricError);
    CHECK_THROWS_AS(tpr(no_pos), UndefinedMetricError);
    ConfusionMatrix no_neg{3, 4, 0, 0};
    CHECK_THROWS_AS(specificity(no_neg), UndefinedMetricError);
    CHECK_THROWS_AS(fpr(no_neg), UndefinedMetricError);
}

TEST_CASE("roc curve and auc") {
    SUBCASE("perfect ordering") {
        std::vector<double> s{0.9, 0.8, 0.2, 0.1};
        std::vector<uint8_t> a{1, 1, 0, 0};
        RocCurve c = roc_auc(s, a);
        CHECK(c.auc == doctest::Approx(1.0));
        CHECK(c.points.front().fpr == 0.0);
        CHECK(c.points.front().tpr == 0.0);
        CHECK(c.points.back().fpr == 1.0);
        CHECK(c.points.back().tpr == 1.0);
    }
    SUBCASE("anti-ordering") {
        std::vector<double> s{0.9, 0.8, 0.2, 0.1};
        std::vector<uint8_t> a{0, 0, 1, 1};
        CHECK(roc_auc(s, a).auc == doctest::Approx(0.0));
    }
    SUBCASE("pairwise count: 3 of 4 pairs correct") {
        std::vector<double> s{0.9, 0.8, 0.7, 0.6};
        std::vector<uint8_t> a{1, 0, 1, 0};
        CHECK(roc_auc(s, a).auc == doctest::Approx(0.75));
    }
    SUBCASE("tied scores cross together") {
        std::vector<double> s{0.5, 0.5, 0.5, 0.5};
        std::vector<uint8_t> a{1, 0, 1, 0};
        RocCurve c = roc_auc(s, a);
        CHECK(c.auc == doctest::Approx(0.5));
        CHECK(c.points.size() == 2); // the tie group walks the full diagonal
    }
    SUBCASE("single class is an error") {
        std::vector<double> s{0.5, 0.4};
        std::vector<uint8_t> a{1, 1};
        CHECK_THROWS_AS(roc_auc(s, a), DataError);
    }
    SUBCASE("fpr is non-decreasing along the curve") {
        std::mt19937_64 rng(9);
        std::vector<double> s(60);
        std::vector<uint8_t> a(60);
        for (int i = 0; i < 60; ++i) {
            s[i] = (rng() % 10) / 10.0;
            a[i] = rng() & 1;
        }
        a[0] = 1;
        a[1] = 0;
        RocCurve c = roc_auc(s, a);
        for (std::size_t i = 1; i < c.points.size(); ++i)
            CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
    }
}

TEST_CASE("auc equals the pairwise ordering statistic on random inputs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 5 + rng() % 45;
        std::vector<double> s(n);
        std::vector<uint8_t> a(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = (rng() % 8) / 7.0; // coarse grid forces ties
            a[i] = rng() & 1;
        }
        a[0] = 1;
        a[1] = 0;
        double got = roc_auc(s, a).auc;
        double want = oracles::pairwise_auc(s, a);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("stratified folds partition the data evenly") {
    SUBCASE("303 records in 10 folds") {
        std::vector<uint8_t> labels(303);
        for (int i = 0; i < 216; ++i) labels[i] = 1;
        auto folds = stratified_kfold(303, labels, 10, 17);
        std::vector<int> seen(303, 0);
        for (const auto& f : folds) {
            CHECK(f.test.size() >= 30);
            CHECK(f.test.size() <= 31);
            CHECK(f.train.size() + f.test.size() == 303);
            for (uint32_t idx : f.test) ++seen[idx];
            // class ratio within one record of the even split
            int pos = 0;
            for (uint32_t idx : f.test) pos += labels[idx];
            double expect = 216.0 * f.test.size() / 303.0;
            CHECK(std::abs(pos - expect) <= 1.0);
        }
        for (int s : seen) CHECK(s == 1); // disjoint and complete
    }
    SUBCASE("leave-one-out") {
        std::vector<uint8_t> labels{1, 0, 1, 0, 1, 0};
        auto folds = stratified_kfold(6, labels, 6, 3);
        for (const auto& f : folds) CHECK(f.test.size() == 1);
    }
    SUBCASE("determinism") {
        std::vector<uint8_t> labels(50);
        for (int i = 0; i < 20; ++i) labels[i] = 1;
        auto a = stratified_kfold(50, labels, 5, 123);
        auto b = stratified_kfold(50, labels, 5, 123);
        for (int f = 0; f < 5; ++f) {
            CHECK(a[f].test == b[f].test);
            CHECK(a[f].train == b[f].train);
        }
        auto c = stratified_kfold(50, labels, 5, 124);
        bool any_diff = false;
        for (int f = 0; f < 5; ++f) any_diff |= (a[f].test != c[f].test);
        CHECK(any_diff);
    }
    SUBCASE("class smaller than k") {
        std::vector<uint8_t> labels{1, 0, 0, 0, 0, 0};
        CHECK_THROWS_AS(stratified_kfold(6, labels, 3, 1), DataError);
    }
}

TEST_CASE("entropy in bits") {
    CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(entropy(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(entropy(std::vector<double>{0.25, 0.75}) == doctest::Approx(0.8113).epsilon(1e-3));
    CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.4}), DataError);
    CHECK_THROWS_AS(entropy(std::vector<double>{-0.1, 1.1}), DataError);
    // uniform maximizes
    for (double p : {0.1, 0.3, 0.45, 0.8})
        CHECK(entropy(std::vector<double>{p, 1 - p}) < 1.0);
}

TEST_CASE("info gain") {
    std::mt19937_64 rng(77);
    BitVector target(100);
    for (int i = 0; i < 100; ++i)
        if (rng() & 1) target.set(i);

    SUBCASE("feature identical to target recovers the full entropy") {
        double h = entropy_of_counts(target.count(), 100 - target.count());
        CHECK(info_gain(target, target) == doctest::Approx(h));
    }
    SUBCASE("constant features carry nothing") {
        CHECK(info_gain(BitVector(100), target) == doctest::Approx(0.0));
        CHECK(info_gain(BitVector(100, true), target) == doctest::Approx(0.0));
    }
    SUBCASE("bounds: 0 <= gain <= target entropy") {
        double h = entropy_of_counts(target.count(), 100 - target.count());
        for (int t = 0; t < 40; ++t) {
            BitVector f(100);
            for (int i = 0; i < 100; ++i)
                if (rng() & 1) f.set(i);
            double g = info_gain(f, target);
            CHECK(g >= 0.0);
            CHECK(g <= h + 1e-12);
        }
    }
}

TEST_CASE("rank_features orders by gain with name ties") {
    BinaryMatrix m;
    m.n_records = 8;
    m.target = BitVector(8);
    for (int i = 0; i < 4; ++i) m.target.set(i);
    m.target_name = "y";
    BitVector copy = m.target;
    BitVector noise(8);
    noise.set(0);
    noise.set(5);
    m.feature_names = {"zz_copy", "aa_copy", "noise"};
    m.columns = {copy, copy, noise};

    AugmentedMatrix aug = inject_features(m, {});
    auto ranking = rank_features(aug, 3);
    REQUIRE(ranking.size() == 3);
    CHECK(ranking[0].name == "aa_copy"); // equal gains settle by name
    CHECK(ranking[1].name == "zz_copy");
    CHECK(ranking[0].gain == doctest::Approx(1.0));
    CHECK(ranking[0].gain == ranking[1].gain);
    CHECK(ranking[2].name == "noise");

    auto threaded = rank_features(aug, 3, 4);
    CHECK(threaded.size() == ranking.size());
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        CHECK(threaded[i].name == ranking[i].name);
        CHECK(threaded[i].gain == ranking[i].gain);
    }
}

} // TEST_SUITE eval
