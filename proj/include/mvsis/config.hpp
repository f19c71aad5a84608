/*
* Copyright (C) 2026 mvsis contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef MVSIS_CONFIG_HPP
#define MVSIS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvsis {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model section: a preset name plus flat scalar parameters.
struct ModelConfig {
    std::string preset = "gghmp";
    std::map<std::string, double> values;

    double get(const std::string& key, double fallback) const {
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    bool has(const std::string& key) const { return values.count(key) > 0; }
};

/// Experiment section of a run configuration. Unset optionals fall back to
/// per-experiment defaults.
struct ExperimentConfig {
    std::string id;
    std::optional<double> horizon;
    std::optional<std::int64_t> steps;
    std::optional<std::int64_t> particles;
    std::uint64_t seed = 0;
    std::vector<double> alphas;
    std::vector<double> i0s;
    /// Estimates of lim alpha E[I_t], consumed by `analyze`.
    std::vector<double> mean_estimates;
    std::string out_dir = "out";
    std::optional<double> order;          // moment order p
    std::optional<double> window_start;   // log-slope window for `lyapunov`
    std::optional<double> bound_time;     // audit time for `bounds`
    std::optional<std::int64_t> paths_per_series;
    int coarse_min_exp = 4;
    int coarse_max_exp = 9;
    int ref_exp = 13;

    ModelConfig model;
};

/// Parses the flat `key = value` grammar with `[experiment]` / `[model]`
/// section headers and `#` comments. Unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

} // namespace mvsis

#endif
