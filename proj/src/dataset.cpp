#include "cadmine/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "cadmine/csv.hpp"

namespace cadmine {

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::numeric: return "numeric";
        case FeatureKind::binominal: return "binominal";
        case FeatureKind::polynomial: return "polynomial";
    }
    return "?";
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "numeric") return FeatureKind::numeric;
    if (s == "binominal") return FeatureKind::binominal;
    if (s == "polynomial") return FeatureKind::polynomial;
    throw DataError(cat("unknown feature kind: '", s, "'"));
}

static std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

int RawDataset::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == name) return static_cast<int>(i);
    return -1;
}

void validate_schema(const std::vector<FeatureSchema>& schema) {
    if (schema.empty()) throw DataError("schema has no features");
    std::unordered_set<std::string> names;
    int targets = 0;
    for (const auto& f : schema) {
        if (!names.insert(f.name).second)
            throw DataError(cat("duplicate feature '", f.name, "'"));
        if (f.role == FeatureRole::target) ++targets;
        switch (f.kind) {
            case FeatureKind::numeric:
                if (!f.allowed_values.empty())
                    throw DataError(cat("numeric feature '", f.name, "' must not list allowed values"));
                break;
            case FeatureKind::binominal:
                if (f.allowed_values.size() != 2)
                    throw DataError(cat("binominal feature '", f.name, "' must have exactly 2 values, has ",
                                        f.allowed_values.size()));
                break;
            case FeatureKind::polynomial:
                if (f.allowed_values.size() < 3)
                    throw DataError(cat("polynomial feature '", f.name, "' must have at least 3 values, has ",
                                        f.allowed_values.size()));
                break;
        }
        // values must be distinct case-insensitively, otherwise matching is ambiguous
        std::unordered_set<std::string> vals;
        for (const auto& v : f.allowed_values)
            if (!vals.insert(lower(v)).second)
                throw DataError(cat("feature '", f.name, "': duplicate allowed value '", v, "'"));
    }
    if (targets == 0) throw DataError("schema has no target feature");
    if (targets > 1) throw DataError("multiple targets in schema");
}

static double parse_numeric_cell(const std::string& cell, std::size_t row,
                                 const std::string& col) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
    double value = 0;
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc{} || ptr != e || b == e)
        throw DataError(cat("row ", row, ", column '", col, "': cannot parse numeric value '", cell, "'"));
    if (!std::isfinite(value))
        throw DataError(cat("row ", row, ", column '", col, "': non-finite value '", cell, "'"));
    return value;
}

RawDataset parse_dataset(const std::string& csv_text, const std::vector<FeatureSchema>& schema,
                         const std::string& origin) {
    validate_schema(schema);
    CsvTable table = parse_csv(csv_text);
    if (table.header.empty()) throw DataError(cat(origin, ": empty file"));

    std::unordered_map<std::string, int> header_pos;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (!header_pos.emplace(table.header[i], static_cast<int>(i)).second)
            throw DataError(cat(origin, ": duplicate column '", table.header[i], "'"));
    }

    std::vector<int> col_of_feature(schema.size(), -1);
    for (std::size_t f = 0; f < schema.size(); ++f) {
        auto it = header_pos.find(schema[f].name);
        if (it == header_pos.end())
            throw DataError(cat(origin, ": missing column '", schema[f].name, "'"));
        col_of_feature[f] = it->second;
    }
    if (table.header.size() != schema.size()) {
        for (const auto& [name, pos] : header_pos) {
            bool known = std::any_of(schema.begin(), schema.end(),
                                     [&](const FeatureSchema& f) { return f.name == name; });
            if (!known) throw DataError(cat(origin, ": extra column '", name, "' not in schema"));
        }
    }
    if (table.rows.empty()) throw DataError(cat(origin, ": empty dataset (header only)"));

    RawDataset ds;
    ds.schema = schema;
    ds.n_records = table.rows.size();
    ds.num_cols.resize(schema.size());
    ds.cat_cols.resize(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) {
        if (schema[f].role == FeatureRole::target) ds.target_index = static_cast<int>(f);
        if (schema[f].kind == FeatureKind::numeric)
            ds.num_cols[f].reserve(ds.n_records);
        else
            ds.cat_cols[f].reserve(ds.n_records);
    }

    // value lookup per categorical feature, case-insensitive
    std::vector<std::unordered_map<std::string, int>> value_of(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f)
        for (std::size_t v = 0; v < schema[f].allowed_values.size(); ++v)
            value_of[f][lower(schema[f].allowed_values[v])] = static_cast<int>(v);

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const std::string& cell = row[col_of_feature[f]];
            if (cell.empty())
                throw DataError(cat(origin, ": row ", r + 1, ", column '", schema[f].name,
                                    "': missing value"));
            if (schema[f].kind == FeatureKind::numeric) {
                ds.num_cols[f].push_back(parse_numeric_cell(cell, r + 1, schema[f].name));
            } else {
                auto it = value_of[f].find(lower(cell));
                if (it == value_of[f].end())
                    throw DataError(cat(origin, ": row ", r + 1, ", column '", schema[f].name,
                                        "': value '", cell, "' not in allowed values"));
                ds.cat_cols[f].push_back(it->second);
            }
        }
    }
    return ds;
}

RawDataset load_dataset(const std::string& path, const std::vector<FeatureSchema>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(cat("cannot open dataset: ", path));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_dataset(text, schema, path);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_dataset(const std::string& path, const RawDataset& ds) {
    CsvTable table;
    for (const auto& f : ds.schema) table.header.push_back(f.name);
    table.rows.resize(ds.n_records);
    for (std::size_t r = 0; r < ds.n_records; ++r) {
        auto& row = table.rows[r];
        row.reserve(ds.schema.size());
        for (std::size_t f = 0; f < ds.schema.size(); ++f) {
            if (ds.schema[f].kind == FeatureKind::numeric)
                row.push_back(format_double(ds.num_cols[f][r]));
            else
                row.push_back(ds.schema[f].allowed_values[ds.cat_cols[f][r]]);
        }
    }
    write_csv(path, table);
}

} // namespace cadmine
