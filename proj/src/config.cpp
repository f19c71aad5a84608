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
#include "mvsis/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mvsis {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config: invalid number '" + value + "' for key '" + key + "'");
    }
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
    std::int64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: invalid integer '" + value + "' for key '" + key + "'");
    return parsed;
}

std::uint64_t parse_seed(const std::string& value) {
    std::uint64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: invalid seed '" + value + "' (decimal 64-bit expected)");
    return parsed;
}

std::vector<double> parse_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const std::string token = trim(item);
        if (token.empty()) throw ConfigError("config: empty list entry for key '" + key + "'");
        out.push_back(parse_double(token, key));
    }
    if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
    return out;
}

const char* kExperimentIds[] = {"extinction", "persistence", "transition", "converge",
                                "lyapunov",   "bounds",      "analyze"};

void apply_experiment_key(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value) {
    if (key == "id") {
        if (std::find(std::begin(kExperimentIds), std::end(kExperimentIds), value) ==
            std::end(kExperimentIds))
            throw ConfigError("config: unknown experiment id '" + value + "'");
        cfg.id = value;
    } else if (key == "T") {
        cfg.horizon = parse_double(value, key);
        if (!(*cfg.horizon > 0.0)) throw ConfigError("config: T must be positive");
    } else if (key == "steps") {
        cfg.steps = parse_int(value, key);
        if (*cfg.steps < 1) throw ConfigError("config: steps must be >= 1");
    } else if (key == "M") {
        cfg.particles = parse_int(value, key);
        if (*cfg.particles < 1) throw ConfigError("config: M must be >= 1");
    } else if (key == "seed") {
        cfg.seed = parse_seed(value);
    } else if (key == "alpha") {
        cfg.alphas = parse_list(value, key);
        for (double a : cfg.alphas)
            if (!(a >= -1.0)) throw ConfigError("config: alpha entries must be >= -1");
    } else if (key == "i0") {
        cfg.i0s = parse_list(value, key);
    } else if (key == "mean_estimate") {
        cfg.mean_estimates = parse_list(value, key);
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "p") {
        cfg.order = parse_double(value, key);
    } else if (key == "window_start") {
        cfg.window_start = parse_double(value, key);
    } else if (key == "bound_time") {
        cfg.bound_time = parse_double(value, key);
    } else if (key == "paths") {
        cfg.paths_per_series = parse_int(value, key);
        if (*cfg.paths_per_series < 0) throw ConfigError("config: paths must be >= 0");
    } else if (key == "coarse_min_exp") {
        cfg.coarse_min_exp = static_cast<int>(parse_int(value, key));
    } else if (key == "coarse_max_exp") {
        cfg.coarse_max_exp = static_cast<int>(parse_int(value, key));
    } else if (key == "ref_exp") {
        cfg.ref_exp = static_cast<int>(parse_int(value, key));
    } else {
        throw ConfigError("config: unknown experiment key '" + key + "'");
    }
}

const char* kPresets[] = {"gghmp", "wang", "cai", "bernardi", "representative", "tractable"};

void apply_model_key(ModelConfig& model, const std::string& key, const std::string& value) {
    if (key == "model") {
        if (std::find(std::begin(kPresets), std::end(kPresets), value) == std::end(kPresets))
            throw ConfigError("config: unknown model preset '" + value + "'");
        model.preset = value;
        return;
    }
    model.values[key] = parse_double(value, key);
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    enum class Section { None, Experiment, Model } section = Section::None;
    std::stringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(line_no));
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "experiment")
                section = Section::Experiment;
            else if (name == "model")
                section = Section::Model;
            else
                throw ConfigError("config: unknown section '" + name + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value at line " + std::to_string(line_no));
        switch (section) {
        case Section::Experiment:
            apply_experiment_key(cfg, key, value);
            break;
        case Section::Model:
            apply_model_key(cfg.model, key, value);
            break;
        case Section::None:
            throw ConfigError("config: key '" + key + "' outside any section");
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace mvsis
