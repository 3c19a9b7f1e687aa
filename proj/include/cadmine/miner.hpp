#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadmine/binarize.hpp"
#include "cadmine/bitvec.hpp"

namespace cadmine {

// Canonical form: items strictly increasing column indices.
struct Itemset {
    std::vector<uint32_t> items;
    uint32_t support_count = 0;
    double support = 0;

    bool operator==(const Itemset&) const = default;
};

std::string itemset_name(const Itemset& s, const std::vector<std::string>& feature_names);

struct MinerConfig {
    double min_sup = 0.1; // required in (0,1)
    int max_k = 0;        // 0 = no cap on itemset size
};

// smallest support count that still meets min_sup, i.e. ceil(min_sup * n)
// with a guard against floating-point littering of exact products
uint32_t support_threshold(double min_sup, std::size_t n_records);

// Count, for each candidate itemset, the transactions containing all its
// items. Reference implementation: per-row scan, no bit tricks.
std::vector<uint32_t> count_supports_serial(const std::vector<BitVector>& columns,
                                            const std::vector<std::vector<uint32_t>>& candidates,
                                            std::size_t n_records);
// Production kernel: bitwise AND + popcount, OpenMP-parallel over candidates.
// threads <= 0 uses the OpenMP default.
std::vector<uint32_t> count_supports(const std::vector<BitVector>& columns,
                                     const std::vector<std::vector<uint32_t>>& candidates,
                                     int threads = 0);

// Join step over canonical frequent (k-1)-itemsets sharing a (k-2)-prefix,
// then prune candidates with any infrequent (k-1)-subset. Input must be
// sorted lexicographically; output is sorted and duplicate-free.
std::vector<std::vector<uint32_t>> apriori_gen(const std::vector<std::vector<uint32_t>>& frequent_prev);

// Level-wise Apriori over the matrix's feature columns (the target column
// never participates). Result is sorted by k, then lexicographically.
std::vector<Itemset> mine_frequent_itemsets(const BinaryMatrix& matrix, const MinerConfig& config,
                                            int threads = 0);

// Base matrix plus one injected column per itemset of size >= 2 (the AND
// of its member columns). 1-itemsets are aliases of their base column and
// are not duplicated.
struct AugmentedMatrix {
    BinaryMatrix base;
    std::vector<Itemset> itemsets;      // all mined itemsets, canonical order
    std::vector<uint32_t> itemset_col;  // per itemset: combined column index
    std::vector<BitVector> injected;    // columns for itemsets with k >= 2
    std::vector<std::string> injected_names;

    std::size_t n_features() const { return base.columns.size() + injected.size(); }
    const BitVector& column(std::size_t j) const;
    const std::string& column_name(std::size_t j) const;
};

AugmentedMatrix inject_features(const BinaryMatrix& matrix, std::vector<Itemset> itemsets);

std::vector<std::pair<double, std::size_t>> sweep_min_sup(const BinaryMatrix& matrix,
                                                          const std::vector<double>& values,
                                                          int threads = 0);

// Row-major view used by the classifier: one bit row per record over the
// combined feature columns, plus 0/1 labels.
struct FeatureTable {
    std::vector<std::string> names;
    std::vector<BitVector> rows; // length n_records, each of width n_features
    std::vector<uint8_t> labels;
    std::size_t width = 0;
};

FeatureTable to_feature_table(const AugmentedMatrix& m);
FeatureTable to_feature_table(const BinaryMatrix& m);

// itemsets as a text table: name, k, support_count, support
void write_itemsets_csv(const std::string& path, const std::vector<Itemset>& itemsets,
                        const std::vector<std::string>& feature_names);
void write_augmented_csv(const std::string& path, const AugmentedMatrix& m);

} // namespace cadmine
