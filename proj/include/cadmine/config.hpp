#pragma once

#include <string>
#include <vector>

#include "cadmine/dataset.hpp"
#include "cadmine/profiling.hpp"

namespace cadmine {

// The one config file of the pipeline: feature schema, patient profiles and
// per-profile normal ranges (see data/zalizadeh.profiles for the shipped
// fixture and README for the format).
struct DataConfig {
    std::vector<FeatureSchema> features;
    ProfileSchema profiles;
    NormalRangeTable ranges;

    int target_index() const;
    // value of the target feature that maps to a True target bit
    int target_positive_index = -1;
};

DataConfig load_config(const std::string& path);
DataConfig parse_config(const std::string& json_text, const std::string& origin = "<memory>");

} // namespace cadmine
