#include "cadmine/binarize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cadmine/csv.hpp"

namespace cadmine {

namespace {

bool iequals(const std::string& a, const std::string& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

int value_index_ci(const FeatureSchema& f, const std::string& value) {
    for (std::size_t i = 0; i < f.allowed_values.size(); ++i)
        if (iequals(f.allowed_values[i], value)) return static_cast<int>(i);
    throw DataError(cat("feature '", f.name, "': value '", value, "' not in allowed values"));
}

} // namespace

int BinaryMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return static_cast<int>(i);
    return -1;
}

bool binarize_binominal(const FeatureSchema& feature, const std::string& value) {
    if (feature.kind != FeatureKind::binominal)
        throw DataError(cat("feature '", feature.name, "' is not binominal"));
    return value_index_ci(feature, value) != feature.negative_index;
}

bool binarize_polynomial(const FeatureSchema& feature, const std::string& value) {
    if (feature.kind != FeatureKind::polynomial)
        throw DataError(cat("feature '", feature.name, "' is not polynomial"));
    return value_index_ci(feature, value) != feature.negative_index;
}

std::pair<bool, bool> expand_gender(const std::string& gender_value, const ProfileSchema& profiles) {
    if (profiles.gender_tags.size() != 2)
        throw DataError("gender expansion expects exactly two gender tags");
    bool first = iequals(gender_value, profiles.gender_tags[0].value);
    bool second = iequals(gender_value, profiles.gender_tags[1].value);
    if (!first && !second)
        throw DataError(cat("unknown gender value '", gender_value, "'"));
    return {first, second};
}

BinaryMatrix binarize_dataset(const DiscretizedDataset& ds, const DataConfig& cfg) {
    int gender_f = -1;
    for (std::size_t f = 0; f < ds.schema.size(); ++f)
        if (ds.schema[f].name == cfg.profiles.gender_feature) gender_f = static_cast<int>(f);

    BinaryMatrix m;
    m.n_records = ds.n_records;

    for (std::size_t f = 0; f < ds.schema.size(); ++f) {
        const FeatureSchema& fs = ds.schema[f];
        if (fs.role == FeatureRole::target) continue;
        if (static_cast<int>(f) == gender_f) {
            for (const auto& g : cfg.profiles.gender_tags) {
                BitVector col(ds.n_records);
                for (std::size_t r = 0; r < ds.n_records; ++r)
                    if (iequals(fs.allowed_values[ds.cat_cols[f][r]], g.value)) col.set(r);
                m.feature_names.push_back(g.tag);
                m.columns.push_back(std::move(col));
            }
        } else if (fs.kind == FeatureKind::numeric) {
            BitVector col(ds.n_records);
            for (std::size_t r = 0; r < ds.n_records; ++r)
                if (ds.label_cols[f][r] != Label::Normal) col.set(r);
            m.feature_names.push_back(fs.name + "2");
            m.columns.push_back(std::move(col));
        } else {
            if (fs.negative_index < 0)
                throw DataError(cat("feature '", fs.name, "' has no declared negative value"));
            BitVector col(ds.n_records);
            for (std::size_t r = 0; r < ds.n_records; ++r)
                if (ds.cat_cols[f][r] != fs.negative_index) col.set(r);
            m.feature_names.push_back(fs.name);
            m.columns.push_back(std::move(col));
        }
    }

    const FeatureSchema& target = ds.schema[ds.target_index];
    m.target_name = target.name;
    m.target = BitVector(ds.n_records);
    for (std::size_t r = 0; r < ds.n_records; ++r)
        if (ds.cat_cols[ds.target_index][r] == cfg.target_positive_index) m.target.set(r);
    return m;
}

void write_binary_csv(const std::string& path, const BinaryMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    for (const auto& name : m.feature_names) out << csv_escape(name) << ',';
    out << csv_escape(m.target_name) << '\n';
    std::string line;
    for (std::size_t r = 0; r < m.n_records; ++r) {
        line.clear();
        for (const auto& col : m.columns) {
            line += col.get(r) ? '1' : '0';
            line += ',';
        }
        line += m.target.get(r) ? '1' : '0';
        line += '\n';
        out << line;
    }
    if (!out) throw DataError(cat("write failed: ", path));
}

BinaryMatrix parse_binary_csv(const std::string& text, const std::string& origin) {
    // header via the strict parser, data rows streamed: wide augmented
    // matrices would be expensive to materialize cell by cell
    std::size_t header_end = text.find('\n');
    if (header_end == std::string::npos)
        throw DataError(cat(origin, ": empty dataset (header only)"));
    CsvTable header_only = parse_csv(text.substr(0, header_end + 1));
    if (header_only.header.size() < 2)
        throw DataError(cat(origin, ": binary matrix needs at least one feature and a target column"));

    BinaryMatrix m;
    std::size_t n_features = header_only.header.size() - 1;
    m.feature_names.assign(header_only.header.begin(), header_only.header.end() - 1);
    m.target_name = header_only.header.back();

    // first pass: record count
    std::size_t n_records = 0;
    for (std::size_t i = header_end + 1; i < text.size(); ++i)
        if (text[i] == '\n') ++n_records;
    if (text.size() > header_end + 1 && text.back() != '\n') ++n_records;
    if (n_records == 0) throw DataError(cat(origin, ": empty dataset (header only)"));

    m.n_records = n_records;
    m.columns.assign(n_features, BitVector(n_records));
    m.target = BitVector(n_records);

    std::size_t pos = header_end + 1, row = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::size_t col = 0;
        std::size_t field_start = pos;
        for (std::size_t i = pos; i <= eol; ++i) {
            if (i == eol || text[i] == ',') {
                std::size_t len = i - field_start;
                if (len > 0 && text[field_start + len - 1] == '\r') --len;
                if (col > n_features)
                    throw DataError(cat(origin, ": row ", row + 1, ": too many fields"));
                bool bit;
                if (len == 1 && text[field_start] == '0')
                    bit = false;
                else if (len == 1 && text[field_start] == '1')
                    bit = true;
                else {
                    std::string cell = text.substr(field_start, len);
                    if (iequals(cell, "false"))
                        bit = false;
                    else if (iequals(cell, "true"))
                        bit = true;
                    else
                        throw DataError(cat(origin, ": row ", row + 1, ", column '",
                                            header_only.header[col], "': expected 0/1, got '",
                                            cell, "'"));
                }
                if (bit) {
                    if (col < n_features)
                        m.columns[col].set(row);
                    else
                        m.target.set(row);
                }
                ++col;
                field_start = i + 1;
            }
        }
        if (col != n_features + 1)
            throw DataError(cat(origin, ": row ", row + 1, ": expected ", n_features + 1,
                                " fields, got ", col));
        ++row;
        pos = eol + 1;
    }
    return m;
}

BinaryMatrix read_binary_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(cat("cannot open file: ", path));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_binary_csv(text, path);
}

} // namespace cadmine
