#include "cadmine/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace cadmine {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

int find_value_ci(const FeatureSchema& f, const std::string& v) {
    for (std::size_t i = 0; i < f.allowed_values.size(); ++i)
        if (lower(f.allowed_values[i]) == lower(v)) return static_cast<int>(i);
    return -1;
}

FeatureSchema parse_feature(const json& j) {
    FeatureSchema f;
    f.name = j.at("name").get<std::string>();
    f.kind = feature_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("unit")) f.unit = j.at("unit").get<std::string>();
    if (j.contains("values")) f.allowed_values = j.at("values").get<std::vector<std::string>>();
    if (j.contains("role")) {
        std::string role = j.at("role").get<std::string>();
        if (role == "target")
            f.role = FeatureRole::target;
        else if (role == "input")
            f.role = FeatureRole::input;
        else
            throw DataError(cat("feature '", f.name, "': unknown role '", role, "'"));
    }

    if (f.kind != FeatureKind::numeric) {
        if (j.contains("negative")) {
            f.negative_index = find_value_ci(f, j.at("negative").get<std::string>());
            if (f.negative_index < 0)
                throw DataError(cat("feature '", f.name, "': negative value '",
                                    j.at("negative").get<std::string>(), "' not in values"));
        } else {
            // default orientation: the absence/Normal side is whichever value
            // reads "no" or "normal"; anything else denotes presence. Left
            // unresolved here; checked after profiles are known (the gender
            // feature is one-hot expanded and needs no orientation).
            for (std::size_t i = 0; i < f.allowed_values.size(); ++i) {
                std::string v = lower(f.allowed_values[i]);
                if (v == "no" || v == "normal") {
                    if (f.negative_index >= 0)
                        throw DataError(cat("feature '", f.name,
                                            "': ambiguous negative value, declare \"negative\""));
                    f.negative_index = static_cast<int>(i);
                }
            }
        }
    }
    return f;
}

AgeAffine parse_cut(const json& j, const std::string& where) {
    if (j.is_number()) return AgeAffine{0, j.get<double>()};
    if (j.is_string()) return parse_age_affine(j.get<std::string>());
    throw DataError(cat(where, ": cut must be a number or an age expression string"));
}

ProfileSchema parse_profiles(const json& j) {
    ProfileSchema s;
    s.age_feature = j.at("age_feature").get<std::string>();
    s.gender_feature = j.at("gender_feature").get<std::string>();

    for (const auto& t : j.at("age_tags")) {
        ProfileSchema::AgeTag tag;
        tag.tag = t.at("tag").get<std::string>();
        if (t.contains("upper_bound"))
            for (const auto& [g, v] : t.at("upper_bound").items())
                tag.upper_bound[g] = v.get<double>();
        s.age_tags.push_back(std::move(tag));
    }
    for (const auto& t : j.at("gender_tags"))
        s.gender_tags.push_back({t.at("tag").get<std::string>(), t.at("value").get<std::string>()});
    for (const auto& t : j.at("condition_tags")) {
        ProfileSchema::ConditionTag tag;
        tag.tag = t.at("tag").get<std::string>();
        tag.is_default = t.value("default", false);
        if (t.contains("when")) {
            tag.when_feature = t.at("when").at("feature").get<std::string>();
            tag.when_value = t.at("when").at("equals").get<std::string>();
        }
        s.condition_tags.push_back(std::move(tag));
    }
    for (const auto& p : j.at("profiles"))
        s.profiles.push_back({p.at("id").get<std::string>(), p.at("age").get<std::string>(),
                              p.at("gender").get<std::string>(), p.at("condition").get<std::string>()});
    return s;
}

NormalRangeTable parse_ranges(const json& j, const ProfileSchema& profiles) {
    NormalRangeTable table;
    for (const auto& r : j) {
        std::string feature = r.at("feature").get<std::string>();
        RangeSpec spec;
        if (r.contains("low")) spec.low = parse_cut(r.at("low"), feature);
        if (r.contains("high")) spec.high = parse_cut(r.at("high"), feature);
        if (r.contains("low_belongs_to")) {
            std::string side = r.at("low_belongs_to").get<std::string>();
            if (side == "low")
                spec.low_in_normal = false;
            else if (side != "normal")
                throw DataError(cat(feature, ": low_belongs_to must be 'low' or 'normal'"));
        }
        if (r.contains("high_belongs_to")) {
            std::string side = r.at("high_belongs_to").get<std::string>();
            if (side == "high")
                spec.high_in_normal = false;
            else if (side != "normal")
                throw DataError(cat(feature, ": high_belongs_to must be 'high' or 'normal'"));
        }
        std::vector<std::string> ids;
        if (r.contains("profiles"))
            ids = r.at("profiles").get<std::vector<std::string>>();
        else
            for (const auto& p : profiles.profiles) ids.push_back(p.id);
        for (const auto& id : ids) {
            auto key = std::make_pair(feature, id);
            if (table.entries.count(key))
                throw DataError(cat("duplicate range for feature '", feature, "', profile '", id, "'"));
            table.entries[key] = spec;
        }
    }
    return table;
}

} // namespace

int DataConfig::target_index() const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].role == FeatureRole::target) return static_cast<int>(i);
    return -1;
}

DataConfig parse_config(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(cat(origin, ": ", e.what()));
    }

    DataConfig cfg;
    try {
        for (const auto& f : j.at("features")) cfg.features.push_back(parse_feature(f));
        cfg.profiles = parse_profiles(j.at("profiles"));
        cfg.ranges = parse_ranges(j.at("ranges"), cfg.profiles);
    } catch (const json::exception& e) {
        throw DataError(cat(origin, ": ", e.what()));
    }

    validate_schema(cfg.features);
    validate_profile_schema(cfg.profiles);
    validate_range_table(cfg.ranges, cfg.features, cfg.profiles);

    for (const auto& f : cfg.features) {
        if (f.kind == FeatureKind::numeric || f.name == cfg.profiles.gender_feature) continue;
        if (f.negative_index < 0)
            throw DataError(cat("feature '", f.name,
                                "': cannot infer negative value, declare \"negative\""));
    }

    int t = cfg.target_index();
    const FeatureSchema& target = cfg.features[t];
    if (target.kind != FeatureKind::binominal)
        throw DataError(cat("target feature '", target.name, "' must be binominal"));
    cfg.target_positive_index = 1 - target.negative_index;
    return cfg;
}

DataConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(cat("cannot open config: ", path));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path);
}

} // namespace cadmine
