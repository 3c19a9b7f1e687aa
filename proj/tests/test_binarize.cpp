#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cadmine/binarize.hpp"
#include "cadmine/config.hpp"

using namespace cadmine;

namespace {

const DataConfig& fixture() {
    static DataConfig cfg = load_config(std::string(CADMINE_DATA_DIR) + "/zalizadeh.profiles");
    return cfg;
}

const FeatureSchema& feature(const char* name) {
    for (const auto& f : fixture().features)
        if (f.name == name) return f;
    throw std::runtime_error("no such feature in fixture");
}

BinaryMatrix sample_matrix() {
    const DataConfig& cfg = fixture();
    RawDataset raw = load_dataset(std::string(CADMINE_DATA_DIR) + "/sample.csv", cfg.features);
    return binarize_dataset(discretize_dataset(raw, cfg.profiles, cfg.ranges), cfg);
}

} // namespace

TEST_SUITE("binarize") {

TEST_CASE("rule 1: presence value of a binominal feature is True") {
    CHECK(binarize_binominal(feature("DM"), "yes"));
    CHECK(binarize_binominal(feature("DM"), "Yes")); // case-insensitive
    CHECK_FALSE(binarize_binominal(feature("DM"), "No"));
    CHECK_FALSE(binarize_binominal(feature("Obesity"), "No"));
    CHECK_THROWS_AS(binarize_binominal(feature("DM"), "maybe"), DataError);
    CHECK_THROWS_AS(binarize_binominal(feature("VHD"), "mild"), DataError); // wrong kind
}

TEST_CASE("rule 2: every value except the Normal one is True") {
    CHECK(binarize_polynomial(feature("VHD"), "mild"));
    CHECK(binarize_polynomial(feature("VHD"), "severe"));
    CHECK(binarize_polynomial(feature("VHD"), "moderate"));
    CHECK_FALSE(binarize_polynomial(feature("VHD"), "Normal"));

    // the creatinine-style case: a polynomial feature over the three labels
    FeatureSchema crlike{"CrLabels", FeatureKind::polynomial, "",
                         {"Normal", "Low", "High"}, FeatureRole::input, 0};
    CHECK(binarize_polynomial(crlike, "Low"));
    CHECK(binarize_polynomial(crlike, "High"));
    CHECK_FALSE(binarize_polynomial(crlike, "Normal"));
}

TEST_CASE("gender expands one-hot") {
    const auto& profiles = fixture().profiles;
    CHECK(expand_gender("Male", profiles) == std::pair{true, false});
    CHECK(expand_gender("Female", profiles) == std::pair{false, true});
    CHECK(expand_gender("female", profiles) == std::pair{false, true});
    CHECK_THROWS_AS(expand_gender("other", profiles), DataError);
    for (const char* g : {"Male", "Female"}) {
        auto [m, f] = expand_gender(g, profiles);
        CHECK((m ^ f));
    }
}

TEST_CASE("the shipped schema binarizes to exactly 49 columns plus target") {
    BinaryMatrix m = sample_matrix();
    CHECK(m.n_features() == 49);
    CHECK(m.n_records == 180);
    CHECK(m.target_name == "CAD");
    CHECK(m.target.size() == 180);

    // gender one-hot per row
    int male = m.column_index("male"), female = m.column_index("female");
    REQUIRE(male >= 0);
    REQUIRE(female >= 0);
    for (std::size_t r = 0; r < m.n_records; ++r)
        CHECK((m.columns[male].get(r) ^ m.columns[female].get(r)));

    // discretized numerics carry the "2" suffix
    CHECK(m.column_index("FBS2") >= 0);
    CHECK(m.column_index("EF2") >= 0);
    CHECK(m.column_index("FBS") < 0);
    // categoricals keep their names
    CHECK(m.column_index("Typical Chest Pain") >= 0);
    CHECK(m.column_index("VHD") >= 0);
}

TEST_CASE("row bits depend only on that record") {
    const DataConfig& cfg = fixture();
    std::string header, row;
    {
        // build one all-normal record, duplicate it
        for (std::size_t i = 0; i < cfg.features.size(); ++i) {
            header += cfg.features[i].name;
            if (i + 1 < cfg.features.size()) header += ',';
        }
        row = "80,40,100,45,1.0,7000,15,4.2,14,140,250,120,80,150,60,30,55,15,Male,No,No,No,No,No,"
              "No,No,No,No,No,No,No,No,No,No,No,No,No,Normal,Normal,No,No,No,No,No,No,No,No,"
              "Normal,No";
    }
    RawDataset ds = parse_dataset(header + "\n" + row + "\n" + row + "\n", cfg.features);
    BinaryMatrix m = binarize_dataset(discretize_dataset(ds, cfg.profiles, cfg.ranges), cfg);

    int male = m.column_index("male");
    for (std::size_t c = 0; c < m.n_features(); ++c) {
        CHECK(m.columns[c].get(0) == m.columns[c].get(1)); // identical records, identical rows
        if (static_cast<int>(c) == male) continue;
        CAPTURE(m.feature_names[c]);
        CHECK_FALSE(m.columns[c].get(0)); // all-normal record has an all-False row (bar one-hot)
    }
    CHECK_FALSE(m.target.get(0));
}

TEST_CASE("binary CSV round-trips") {
    BinaryMatrix m = sample_matrix();
    auto path = (std::filesystem::temp_directory_path() / "cadmine_binary_rt.csv").string();
    write_binary_csv(path, m);
    BinaryMatrix back = read_binary_csv(path);
    CHECK(back.feature_names == m.feature_names);
    CHECK(back.target_name == m.target_name);
    CHECK(back.n_records == m.n_records);
    CHECK(back.columns == m.columns);
    CHECK(back.target == m.target);
    std::remove(path.c_str());
}

TEST_CASE("every base column is reachable in the sample data") {
    BinaryMatrix m = sample_matrix();
    for (std::size_t c = 0; c < m.n_features(); ++c) {
        CAPTURE(m.feature_names[c]);
        CHECK(m.columns[c].count() > 0); // some record sets each bit
    }
}

} // TEST_SUITE binarize
