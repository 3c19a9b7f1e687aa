#include "cadmine/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <omp.h>

#include "cadmine/csv.hpp"

namespace cadmine {

namespace {

int resolve_threads(int threads) {
    return threads > 0 ? threads : omp_get_max_threads();
}

// hash of an item list, for the prune step's subset lookups
struct ItemsHash {
    std::size_t operator()(const std::vector<uint32_t>& v) const {
        uint64_t h = 1469598103934665603ull;
        for (uint32_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace

std::string itemset_name(const Itemset& s, const std::vector<std::string>& feature_names) {
    std::string name;
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (i) name += '^';
        name += feature_names.at(s.items[i]);
    }
    return name;
}

uint32_t support_threshold(double min_sup, std::size_t n_records) {
    if (!(min_sup > 0.0 && min_sup < 1.0))
        throw DataError(cat("min_sup must be in (0,1), got ", min_sup));
    double raw = min_sup * static_cast<double>(n_records);
    auto t = static_cast<uint32_t>(std::ceil(raw - 1e-9));
    return std::max<uint32_t>(t, 1);
}

std::vector<uint32_t> count_supports_serial(const std::vector<BitVector>& columns,
                                            const std::vector<std::vector<uint32_t>>& candidates,
                                            std::size_t n_records) {
    std::vector<uint32_t> counts(candidates.size(), 0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        uint32_t n = 0;
        for (std::size_t r = 0; r < n_records; ++r) {
            bool all = true;
            for (uint32_t item : candidates[c])
                if (!columns[item].get(r)) {
                    all = false;
                    break;
                }
            if (all) ++n;
        }
        counts[c] = n;
    }
    return counts;
}

std::vector<uint32_t> count_supports(const std::vector<BitVector>& columns,
                                     const std::vector<std::vector<uint32_t>>& candidates,
                                     int threads) {
    std::vector<uint32_t> counts(candidates.size(), 0);
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(candidates.size()); ++c) {
        const auto& items = candidates[c];
        BitVector acc = columns.at(items.at(0));
        for (std::size_t i = 1; i < items.size(); ++i) acc &= columns.at(items[i]);
        counts[c] = static_cast<uint32_t>(acc.count());
    }
    return counts;
}

std::vector<std::vector<uint32_t>> apriori_gen(const std::vector<std::vector<uint32_t>>& frequent_prev) {
    std::vector<std::vector<uint32_t>> candidates;
    if (frequent_prev.empty()) return candidates;
    const std::size_t k1 = frequent_prev.front().size();

    std::unordered_set<std::vector<uint32_t>, ItemsHash> prev_set(frequent_prev.begin(),
                                                                  frequent_prev.end());

    // join: pairs agreeing on the first k-2 items; input is sorted, so
    // joinable partners are adjacent runs
    for (std::size_t i = 0; i < frequent_prev.size(); ++i) {
        for (std::size_t j = i + 1; j < frequent_prev.size(); ++j) {
            const auto& a = frequent_prev[i];
            const auto& b = frequent_prev[j];
            if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
            std::vector<uint32_t> cand(a);
            cand.push_back(b.back()); // a.back() < b.back() by sort order

            // prune: every (k-1)-subset must be frequent
            bool ok = true;
            std::vector<uint32_t> subset(cand.begin() + 1, cand.end());
            for (std::size_t drop = 0; ok && drop < cand.size(); ++drop) {
                // subset = cand without position `drop`; the last two drops
                // are the join parents, already known frequent
                if (drop >= k1 - 1) break;
                if (!prev_set.count(subset)) ok = false;
                if (drop + 1 < cand.size()) subset[drop] = cand[drop];
            }
            if (ok) candidates.push_back(std::move(cand));
        }
    }
    return candidates; // sorted by construction
}

std::vector<Itemset> mine_frequent_itemsets(const BinaryMatrix& matrix, const MinerConfig& config,
                                            int threads) {
    if (matrix.n_records == 0) throw DataError("cannot mine an empty matrix");
    const uint32_t threshold = support_threshold(config.min_sup, matrix.n_records);
    const double n = static_cast<double>(matrix.n_records);
    const int nt = resolve_threads(threads);

    std::vector<Itemset> result;

    // level 1
    std::vector<std::vector<uint32_t>> frequent_items; // item lists of current level
    std::vector<BitVector> frequent_bits;              // materialized columns, same order
    for (uint32_t j = 0; j < matrix.columns.size(); ++j) {
        auto count = static_cast<uint32_t>(matrix.columns[j].count());
        if (count >= threshold) {
            frequent_items.push_back({j});
            frequent_bits.push_back(matrix.columns[j]);
            result.push_back({{j}, count, count / n});
        }
    }

    std::size_t k = 2;
    while (!frequent_items.empty() && (config.max_k == 0 || k <= static_cast<std::size_t>(config.max_k))) {
        // candidate generation with parent tracking: candidate = prev[i] + last
        // item of prev[j], so its column is prev_bits[i] AND column[new item]
        std::unordered_set<std::vector<uint32_t>, ItemsHash> prev_set(frequent_items.begin(),
                                                                      frequent_items.end());
        struct Candidate {
            std::vector<uint32_t> items;
            std::size_t parent;
            uint32_t new_item;
        };
        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < frequent_items.size(); ++i) {
            for (std::size_t j = i + 1; j < frequent_items.size(); ++j) {
                const auto& a = frequent_items[i];
                const auto& b = frequent_items[j];
                if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
                std::vector<uint32_t> cand(a);
                cand.push_back(b.back());

                bool ok = true;
                std::vector<uint32_t> subset(cand.begin() + 1, cand.end());
                for (std::size_t drop = 0; ok && drop + 2 < cand.size(); ++drop) {
                    if (!prev_set.count(subset)) ok = false;
                    subset[drop] = cand[drop];
                }
                if (ok) candidates.push_back({std::move(cand), i, b.back()});
            }
        }
        if (candidates.empty()) break;

        std::vector<uint32_t> counts(candidates.size());
        std::vector<BitVector> bits(candidates.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(candidates.size()); ++c) {
            BitVector col = frequent_bits[candidates[c].parent] & matrix.columns[candidates[c].new_item];
            counts[c] = static_cast<uint32_t>(col.count());
            bits[c] = std::move(col);
        }

        std::vector<std::vector<uint32_t>> next_items;
        std::vector<BitVector> next_bits;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (counts[c] >= threshold) {
                result.push_back({candidates[c].items, counts[c], counts[c] / n});
                next_items.push_back(std::move(candidates[c].items));
                next_bits.push_back(std::move(bits[c]));
            }
        }
        frequent_items = std::move(next_items);
        frequent_bits = std::move(next_bits);
        ++k;
    }

    // already grouped by level and lexicographic within each level
    return result;
}

const BitVector& AugmentedMatrix::column(std::size_t j) const {
    return j < base.columns.size() ? base.columns[j] : injected[j - base.columns.size()];
}

const std::string& AugmentedMatrix::column_name(std::size_t j) const {
    return j < base.columns.size() ? base.feature_names[j] : injected_names[j - base.columns.size()];
}

AugmentedMatrix inject_features(const BinaryMatrix& matrix, std::vector<Itemset> itemsets) {
    AugmentedMatrix out;
    out.base = matrix;
    out.itemsets = std::move(itemsets);
    out.itemset_col.reserve(out.itemsets.size());

    for (const auto& s : out.itemsets) {
        if (s.items.empty()) throw DataError("empty itemset cannot be injected");
        for (uint32_t item : s.items)
            if (item >= matrix.columns.size())
                throw DataError(cat("itemset references column ", item, " out of range"));
        if (s.items.size() == 1) {
            out.itemset_col.push_back(s.items[0]); // alias of the base column
            continue;
        }
        BitVector col = matrix.columns[s.items[0]];
        for (std::size_t i = 1; i < s.items.size(); ++i) col &= matrix.columns[s.items[i]];
        out.itemset_col.push_back(static_cast<uint32_t>(matrix.columns.size() + out.injected.size()));
        out.injected_names.push_back(itemset_name(s, matrix.feature_names));
        out.injected.push_back(std::move(col));
    }
    return out;
}

std::vector<std::pair<double, std::size_t>> sweep_min_sup(const BinaryMatrix& matrix,
                                                          const std::vector<double>& values,
                                                          int threads) {
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(values.size());
    for (double v : values) {
        MinerConfig cfg;
        cfg.min_sup = v;
        out.emplace_back(v, mine_frequent_itemsets(matrix, cfg, threads).size());
    }
    return out;
}

FeatureTable to_feature_table(const AugmentedMatrix& m) {
    FeatureTable t;
    t.width = m.n_features();
    t.names.reserve(t.width);
    for (std::size_t j = 0; j < t.width; ++j) t.names.push_back(m.column_name(j));
    t.rows.assign(m.base.n_records, BitVector(t.width));
    for (std::size_t j = 0; j < t.width; ++j) {
        const BitVector& col = m.column(j);
        for (std::size_t r = 0; r < m.base.n_records; ++r)
            if (col.get(r)) t.rows[r].set(j);
    }
    t.labels.resize(m.base.n_records);
    for (std::size_t r = 0; r < m.base.n_records; ++r) t.labels[r] = m.base.target.get(r) ? 1 : 0;
    return t;
}

FeatureTable to_feature_table(const BinaryMatrix& m) {
    return to_feature_table(AugmentedMatrix{m, {}, {}, {}, {}});
}

void write_itemsets_csv(const std::string& path, const std::vector<Itemset>& itemsets,
                        const std::vector<std::string>& feature_names) {
    CsvTable table;
    table.header = {"name", "k", "support_count", "support"};
    char buf[32];
    for (const auto& s : itemsets) {
        std::snprintf(buf, sizeof(buf), "%.6f", s.support);
        table.rows.push_back({itemset_name(s, feature_names), std::to_string(s.items.size()),
                              std::to_string(s.support_count), buf});
    }
    write_csv(path, table);
}

void write_augmented_csv(const std::string& path, const AugmentedMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    for (std::size_t j = 0; j < m.n_features(); ++j) out << csv_escape(m.column_name(j)) << ',';
    out << csv_escape(m.base.target_name) << '\n';
    std::string line;
    for (std::size_t r = 0; r < m.base.n_records; ++r) {
        line.clear();
        for (std::size_t j = 0; j < m.n_features(); ++j) {
            line += m.column(j).get(r) ? '1' : '0';
            line += ',';
        }
        line += m.base.target.get(r) ? '1' : '0';
        line += '\n';
        out << line;
    }
    if (!out) throw DataError(cat("write failed: ", path));
}

} // namespace cadmine
