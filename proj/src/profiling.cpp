#include "cadmine/profiling.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "cadmine/csv.hpp"

namespace cadmine {

const char* to_string(Label l) {
    switch (l) {
        case Label::Low: return "Low";
        case Label::Normal: return "Normal";
        case Label::High: return "High";
    }
    return "?";
}

// --- affine-in-age expression parser ------------------------------------

namespace {

struct AffineParser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool peek_number() {
        skip_ws();
        return pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.');
    }

    double number() {
        skip_ws();
        double v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
        if (ec != std::errc{})
            throw DataError(cat("bad number in range expression '", text, "'"));
        pos = ptr - text.data();
        return v;
    }

    bool eat_age() {
        skip_ws();
        if (text.substr(pos, 3) == "age" || text.substr(pos, 3) == "Age" ||
            text.substr(pos, 3) == "AGE") {
            pos += 3;
            return true;
        }
        return false;
    }

    // term := number ['*' age | '/' number] | age ['*' number | '/' number] | number '*' age
    AgeAffine term() {
        AgeAffine t;
        if (eat_age()) {
            t.scale = 1;
            if (eat('*'))
                t.scale = number();
            else if (eat('/'))
                t.scale = 1.0 / number();
        } else if (peek_number()) {
            double v = number();
            if (eat('*')) {
                if (!eat_age())
                    throw DataError(cat("expected 'age' after '*' in '", text, "'"));
                t.scale = v;
            } else if (eat('/')) {
                t.offset = v / number();
            } else {
                t.offset = v;
            }
        } else {
            throw DataError(cat("cannot parse range expression '", text, "'"));
        }
        return t;
    }

    AgeAffine parse() {
        AgeAffine sum;
        double sign = 1;
        if (eat('-')) sign = -1;
        AgeAffine t = term();
        sum.scale = sign * t.scale;
        sum.offset = sign * t.offset;
        for (;;) {
            skip_ws();
            if (pos >= text.size()) break;
            if (eat('+'))
                sign = 1;
            else if (eat('-'))
                sign = -1;
            else
                throw DataError(cat("trailing garbage in range expression '", text, "'"));
            t = term();
            sum.scale += sign * t.scale;
            sum.offset += sign * t.offset;
        }
        return sum;
    }
};

} // namespace

AgeAffine parse_age_affine(const std::string& text) {
    AffineParser p{text};
    return p.parse();
}

// --- profile schema -------------------------------------------------------

int ProfileSchema::profile_index(const std::string& id) const {
    for (std::size_t i = 0; i < profiles.size(); ++i)
        if (profiles[i].id == id) return static_cast<int>(i);
    return -1;
}

std::size_t num_profiles(const ProfileSchema& schema) {
    return schema.age_tags.size() * schema.gender_tags.size() * schema.condition_tags.size();
}

void validate_profile_schema(const ProfileSchema& s) {
    if (s.age_tags.empty() || s.gender_tags.empty() || s.condition_tags.empty())
        throw DataError("profile schema: every tag axis needs at least one tag");
    if (s.age_feature.empty() || s.gender_feature.empty())
        throw DataError("profile schema: age_feature and gender_feature are required");

    // bounds strictly increasing per gender; only the last age tag may be open-ended
    for (const auto& g : s.gender_tags) {
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.age_tags.size(); ++i) {
            auto it = s.age_tags[i].upper_bound.find(g.tag);
            bool has = it != s.age_tags[i].upper_bound.end();
            if (i + 1 < s.age_tags.size()) {
                if (!has)
                    throw DataError(cat("age tag '", s.age_tags[i].tag, "' missing upper bound for gender '",
                                        g.tag, "'"));
                if (it->second <= prev)
                    throw DataError(cat("age bounds not strictly increasing for gender '", g.tag, "'"));
                prev = it->second;
            } else if (has && it->second <= prev) {
                throw DataError(cat("age bounds not strictly increasing for gender '", g.tag, "'"));
            }
        }
    }

    int defaults = 0;
    for (const auto& c : s.condition_tags) {
        if (c.is_default) ++defaults;
        if (!c.is_default && (c.when_feature.empty() || c.when_value.empty()))
            throw DataError(cat("condition tag '", c.tag, "' needs a match rule or default flag"));
    }
    if (defaults != 1) throw DataError("profile schema: exactly one condition tag must be the default");

    std::set<std::tuple<std::string, std::string, std::string>> combos;
    std::set<std::string> ids;
    for (const auto& p : s.profiles) {
        if (!ids.insert(p.id).second) throw DataError(cat("duplicate profile id '", p.id, "'"));
        auto has_tag = [](const auto& tags, const std::string& t) {
            return std::any_of(tags.begin(), tags.end(), [&](const auto& x) { return x.tag == t; });
        };
        if (!has_tag(s.age_tags, p.age_tag))
            throw DataError(cat("profile '", p.id, "': unknown age tag '", p.age_tag, "'"));
        if (!has_tag(s.gender_tags, p.gender_tag))
            throw DataError(cat("profile '", p.id, "': unknown gender tag '", p.gender_tag, "'"));
        if (!has_tag(s.condition_tags, p.condition_tag))
            throw DataError(cat("profile '", p.id, "': unknown condition tag '", p.condition_tag, "'"));
        if (!combos.insert({p.age_tag, p.gender_tag, p.condition_tag}).second)
            throw DataError(cat("duplicate profile combination in '", p.id, "'"));
    }
    if (combos.size() != num_profiles(s))
        throw DataError(cat("profile schema covers ", combos.size(), " tag combinations, expected ",
                            num_profiles(s)));
}

// --- range table ----------------------------------------------------------

const RangeSpec& NormalRangeTable::at(const std::string& feature, const std::string& profile) const {
    auto it = entries.find({feature, profile});
    if (it == entries.end())
        throw DataError(cat("no normal range for feature '", feature, "', profile '", profile, "'"));
    return it->second;
}

void validate_range_table(const NormalRangeTable& table, const std::vector<FeatureSchema>& features,
                          const ProfileSchema& profiles) {
    for (const auto& f : features) {
        if (f.kind != FeatureKind::numeric || f.role != FeatureRole::input) continue;
        for (const auto& p : profiles.profiles) {
            const RangeSpec& spec = table.at(f.name, p.id); // throws if missing
            if (spec.low && spec.high && spec.low->is_constant() && spec.high->is_constant() &&
                spec.low->offset >= spec.high->offset)
                throw DataError(cat("range for '", f.name, "', profile '", p.id,
                                    "': low cut must be below high cut"));
            if (!spec.low && !spec.high)
                throw DataError(cat("range for '", f.name, "', profile '", p.id, "' has no cuts"));
        }
    }
    for (const auto& [key, spec] : table.entries) {
        bool known = std::any_of(features.begin(), features.end(), [&](const FeatureSchema& f) {
            return f.name == key.first && f.kind == FeatureKind::numeric;
        });
        if (!known)
            throw DataError(cat("range table references unknown numeric feature '", key.first, "'"));
        if (profiles.profile_index(key.second) < 0)
            throw DataError(cat("range table references unknown profile '", key.second, "'"));
    }
}

// --- discretization -------------------------------------------------------

std::string assign_profile(const RawDataset& ds, std::size_t row, const ProfileSchema& schema) {
    int age_f = ds.feature_index(schema.age_feature);
    int gender_f = ds.feature_index(schema.gender_feature);
    if (age_f < 0 || ds.schema[age_f].kind != FeatureKind::numeric)
        throw DataError(cat("age feature '", schema.age_feature, "' missing or not numeric"));
    if (gender_f < 0 || ds.schema[gender_f].kind == FeatureKind::numeric)
        throw DataError(cat("gender feature '", schema.gender_feature, "' missing or not categorical"));

    double age = ds.num(age_f, row);
    const std::string& gender_value = ds.cat_label(gender_f, row);

    const ProfileSchema::GenderTag* gender = nullptr;
    for (const auto& g : schema.gender_tags) {
        if (std::equal(g.value.begin(), g.value.end(), gender_value.begin(), gender_value.end(),
                       [](char a, char b) {
                           return std::tolower(static_cast<unsigned char>(a)) ==
                                  std::tolower(static_cast<unsigned char>(b));
                       }) &&
            g.value.size() == gender_value.size()) {
            gender = &g;
            break;
        }
    }
    if (!gender)
        throw DataError(cat("record ", row + 1, ": gender value '", gender_value,
                            "' matches no gender tag"));

    // age tag: first tag whose gender-specific upper bound is >= age
    const std::string* age_tag = nullptr;
    for (const auto& t : schema.age_tags) {
        auto it = t.upper_bound.find(gender->tag);
        if (it == t.upper_bound.end() || age <= it->second) {
            age_tag = &t.tag;
            break;
        }
    }
    if (!age_tag)
        throw DataError(cat("record ", row + 1, ": age ", age, " matches no age tag"));

    const std::string* condition_tag = nullptr;
    const std::string* default_tag = nullptr;
    for (const auto& c : schema.condition_tags) {
        if (c.is_default) {
            default_tag = &c.tag;
            continue;
        }
        int f = ds.feature_index(c.when_feature);
        if (f < 0 || ds.schema[f].kind == FeatureKind::numeric)
            throw DataError(cat("condition tag '", c.tag, "': feature '", c.when_feature,
                                "' missing or not categorical"));
        if (ds.cat_label(f, row) == c.when_value) {
            condition_tag = &c.tag;
            break;
        }
    }
    if (!condition_tag) condition_tag = default_tag;

    for (const auto& p : schema.profiles)
        if (p.age_tag == *age_tag && p.gender_tag == gender->tag && p.condition_tag == *condition_tag)
            return p.id;
    throw DataError(cat("record ", row + 1, ": no profile for tags (", *age_tag, ", ", gender->tag,
                        ", ", *condition_tag, ")"));
}

Label discretize_value(double value, double age, const RangeSpec& spec) {
    if (!std::isfinite(value)) throw DataError("cannot discretize non-finite value");
    if (spec.low) {
        double cut = spec.low->eval(age);
        if (value < cut || (value == cut && !spec.low_in_normal)) return Label::Low;
    }
    if (spec.high) {
        double cut = spec.high->eval(age);
        if (value > cut || (value == cut && !spec.high_in_normal)) return Label::High;
    }
    return Label::Normal;
}

Label discretize_value(const std::string& feature, double value, double age,
                       const std::string& profile, const NormalRangeTable& table) {
    return discretize_value(value, age, table.at(feature, profile));
}

DiscretizedDataset discretize_dataset(const RawDataset& ds, const ProfileSchema& schema,
                                      const NormalRangeTable& table) {
    int age_f = ds.feature_index(schema.age_feature);
    if (age_f < 0) throw DataError(cat("age feature '", schema.age_feature, "' not in dataset"));

    DiscretizedDataset out;
    out.schema = ds.schema;
    out.n_records = ds.n_records;
    out.target_index = ds.target_index;
    out.label_cols.resize(ds.schema.size());
    out.cat_cols = ds.cat_cols;
    out.profile_ids.reserve(ds.n_records);

    for (std::size_t f = 0; f < ds.schema.size(); ++f)
        if (ds.schema[f].kind == FeatureKind::numeric)
            out.label_cols[f].resize(ds.n_records);

    for (std::size_t r = 0; r < ds.n_records; ++r) {
        std::string profile = assign_profile(ds, r, schema);
        double age = ds.num(age_f, r);
        for (std::size_t f = 0; f < ds.schema.size(); ++f) {
            if (ds.schema[f].kind != FeatureKind::numeric || ds.schema[f].role == FeatureRole::target)
                continue;
            out.label_cols[f][r] = discretize_value(ds.schema[f].name, ds.num(f, r), age, profile, table);
        }
        out.profile_ids.push_back(std::move(profile));
    }
    return out;
}

void write_discretized_csv(const std::string& path, const DiscretizedDataset& ds) {
    CsvTable table;
    table.header.push_back("profile");
    for (std::size_t f = 0; f < ds.schema.size(); ++f) {
        if (static_cast<int>(f) == ds.target_index) continue;
        if (ds.schema[f].kind == FeatureKind::numeric)
            table.header.push_back(ds.schema[f].name + "2");
        else
            table.header.push_back(ds.schema[f].name);
    }
    table.header.push_back(ds.schema[ds.target_index].name);

    table.rows.resize(ds.n_records);
    for (std::size_t r = 0; r < ds.n_records; ++r) {
        auto& row = table.rows[r];
        row.push_back(ds.profile_ids[r]);
        for (std::size_t f = 0; f < ds.schema.size(); ++f) {
            if (static_cast<int>(f) == ds.target_index) continue;
            if (ds.schema[f].kind == FeatureKind::numeric)
                row.push_back(to_string(ds.label_cols[f][r]));
            else
                row.push_back(ds.schema[f].allowed_values[ds.cat_cols[f][r]]);
        }
        int t = ds.target_index;
        row.push_back(ds.schema[t].allowed_values[ds.cat_cols[t][r]]);
    }
    write_csv(path, table);
}

} // namespace cadmine
