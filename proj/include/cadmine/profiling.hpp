#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cadmine/dataset.hpp"

namespace cadmine {

enum class Label : uint8_t { Low, Normal, High };
const char* to_string(Label l);

// Affine expression in the record's own age: scale*age + offset.
// A constant cut has scale == 0.
struct AgeAffine {
    double scale = 0;
    double offset = 0;
    double eval(double age) const { return scale * age + offset; }
    bool is_constant() const { return scale == 0; }
    bool operator==(const AgeAffine&) const = default;
};

// Parses "60", "age/2", "age/2 + 5", "0.5*age - 1" and the like.
AgeAffine parse_age_affine(const std::string& text);

// One normal-range row: values below the low cut are Low, above the high cut
// High, Normal otherwise. The *_in_normal flags say which side owns a value
// that lands exactly on a cut ("EF <= 50 is Low" needs the closed-Low form).
struct RangeSpec {
    std::optional<AgeAffine> low;
    std::optional<AgeAffine> high;
    bool low_in_normal = true;
    bool high_in_normal = true;

    bool can_emit(Label l) const {
        if (l == Label::Low) return low.has_value();
        if (l == Label::High) return high.has_value();
        return true;
    }
    bool operator==(const RangeSpec&) const = default;
};

struct ProfileSchema {
    std::string age_feature;
    std::string gender_feature;

    struct AgeTag {
        std::string tag;
        // upper bound in years per gender tag; unset (empty map entry absent)
        // means unbounded, which is only legal for the last tag
        std::map<std::string, double> upper_bound;
    };
    std::vector<AgeTag> age_tags;

    struct GenderTag {
        std::string tag;
        std::string value; // spelling in the dataset's gender feature
    };
    std::vector<GenderTag> gender_tags;

    struct ConditionTag {
        std::string tag;
        bool is_default = false;
        std::string when_feature; // non-default tags match when feature == value
        std::string when_value;
    };
    std::vector<ConditionTag> condition_tags;

    struct Profile {
        std::string id;
        std::string age_tag;
        std::string gender_tag;
        std::string condition_tag;
    };
    std::vector<Profile> profiles;

    int profile_index(const std::string& id) const;
};

// Throws DataError unless every (age, gender, condition) tag combination is
// covered exactly once and age bounds are strictly increasing per gender.
void validate_profile_schema(const ProfileSchema& schema);

std::size_t num_profiles(const ProfileSchema& schema);

struct NormalRangeTable {
    // (feature name, profile id) -> range
    std::map<std::pair<std::string, std::string>, RangeSpec> entries;

    const RangeSpec& at(const std::string& feature, const std::string& profile) const;
};

// Every numeric input feature of `features` must have a range for every
// profile of `profiles`; throws DataError otherwise.
void validate_range_table(const NormalRangeTable& table,
                          const std::vector<FeatureSchema>& features,
                          const ProfileSchema& profiles);

struct DiscretizedDataset {
    std::vector<FeatureSchema> schema;
    std::vector<std::string> profile_ids;        // per record
    std::vector<std::vector<Label>> label_cols;  // numeric slots only
    std::vector<std::vector<int>> cat_cols;      // categorical passthrough
    std::size_t n_records = 0;
    int target_index = -1;
};

// Profile of one record: age tag from the gender-specific bounds, gender tag
// from the gender feature, condition tag from the first matching rule.
std::string assign_profile(const RawDataset& ds, std::size_t row, const ProfileSchema& schema);

Label discretize_value(double value, double age, const RangeSpec& spec);
Label discretize_value(const std::string& feature, double value, double age,
                       const std::string& profile, const NormalRangeTable& table);

DiscretizedDataset discretize_dataset(const RawDataset& ds, const ProfileSchema& schema,
                                      const NormalRangeTable& table);

// One row per record: profile id, numeric features as Low/Normal/High labels
// under their "2"-suffixed names, categoricals as-is, target last.
void write_discretized_csv(const std::string& path, const DiscretizedDataset& ds);

} // namespace cadmine
