#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cadmine/error.hpp"

namespace cadmine {

enum class FeatureKind { numeric, binominal, polynomial };
enum class FeatureRole { input, target };

std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct FeatureSchema {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::string unit;                        // optional, numeric only
    std::vector<std::string> allowed_values; // categorical only
    FeatureRole role = FeatureRole::input;
    // Index into allowed_values of the value that binarizes to False
    // (the "No"/"Normal" side). Resolved when the config is loaded.
    int negative_index = -1;

    bool operator==(const FeatureSchema&) const = default;
};

// Columnar storage: exactly one of num_cols[i] / cat_cols[i] is populated
// per schema slot. Categorical cells hold indices into allowed_values.
struct RawDataset {
    std::vector<FeatureSchema> schema;
    std::vector<std::vector<double>> num_cols;
    std::vector<std::vector<int>> cat_cols;
    std::size_t n_records = 0;
    int target_index = -1;

    int feature_index(const std::string& name) const; // -1 if absent
    double num(int feature, std::size_t row) const { return num_cols[feature][row]; }
    int cat(int feature, std::size_t row) const { return cat_cols[feature][row]; }
    const std::string& cat_label(int feature, std::size_t row) const {
        return schema[feature].allowed_values[cat_cols[feature][row]];
    }

    bool operator==(const RawDataset&) const = default;
};

// Throws DataError on the first schema violation: duplicate names, zero or
// multiple targets, binominal without exactly 2 values, polynomial with < 3,
// numeric with allowed_values.
void validate_schema(const std::vector<FeatureSchema>& schema);

// CSV with header row; columns matched to schema by exact name (any column
// order), values matched case-insensitively for categoricals. No missing
// values allowed. Record order preserved.
RawDataset load_dataset(const std::string& path, const std::vector<FeatureSchema>& schema);
RawDataset parse_dataset(const std::string& csv_text, const std::vector<FeatureSchema>& schema,
                         const std::string& origin = "<memory>");

// Writes columns in schema order; categorical cells use the canonical
// spelling from allowed_values; numeric cells round-trip exactly.
void write_dataset(const std::string& path, const RawDataset& ds);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

} // namespace cadmine
