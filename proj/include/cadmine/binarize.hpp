#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cadmine/bitvec.hpp"
#include "cadmine/config.hpp"
#include "cadmine/profiling.hpp"

namespace cadmine {

// Patient-by-feature boolean matrix: the Apriori transaction database and,
// row-major, the SVM design matrix. Column order is fixed by the schema.
struct BinaryMatrix {
    std::vector<std::string> feature_names;
    std::vector<BitVector> columns; // one per feature, length n_records
    std::string target_name;
    BitVector target;
    std::size_t n_records = 0;

    std::size_t n_features() const { return columns.size(); }
    int column_index(const std::string& name) const;
};

// Rule 1: the presence value of a two-valued feature is True.
bool binarize_binominal(const FeatureSchema& feature, const std::string& value);
// Rule 2: every value except the absence/Normal one is True.
bool binarize_polynomial(const FeatureSchema& feature, const std::string& value);
// Gender becomes two one-hot columns; exactly one of the pair is True.
std::pair<bool, bool> expand_gender(const std::string& gender_value, const ProfileSchema& profiles);

// Column layout: schema order with the gender feature expanded into one
// column per gender tag, discretized numerics under their "2" names
// (True iff label != Normal); target kept separate.
BinaryMatrix binarize_dataset(const DiscretizedDataset& ds, const DataConfig& cfg);

// 0/1 CSV with feature names as header and the target as last column.
void write_binary_csv(const std::string& path, const BinaryMatrix& m);
BinaryMatrix read_binary_csv(const std::string& path);
BinaryMatrix parse_binary_csv(const std::string& text, const std::string& origin = "<memory>");

} // namespace cadmine
