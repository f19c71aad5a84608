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
#ifndef MVSIS_EXPERIMENTS_HPP
#define MVSIS_EXPERIMENTS_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "mvsis/asymptotics.hpp"
#include "mvsis/config.hpp"
#include "mvsis/engine.hpp"

namespace mvsis {

/// Log-log least-squares fit of strong errors against meshes.
struct RateFit {
    std::vector<double> meshes;  // strictly decreasing
    std::vector<double> errors;  // positive
    double slope = 0.0;
    double intercept = 0.0;
    /// Diagnostic: the same errors measured between the clipped states
    /// min(max(x, 0), N). Coarse meshes can park raw scheme values below 0,
    /// where this model freezes; the clipped comparison removes that
    /// component.
    std::vector<double> clipped_errors;
    std::optional<double> clipped_slope;
};

RateFit fit_loglog(std::vector<double> meshes, std::vector<double> errors);

struct ConvergenceSpec {
    explicit ConvergenceSpec(GeneralModel m) : model(std::move(m)) {}

    GeneralModel model;
    double horizon = 0.5;
    std::int64_t particles = 512;
    std::uint64_t seed = 0;
    double order = 2.0;
    std::vector<int> coarse_exponents;  // mesh = T / 2^k per entry
    int ref_exponent = 13;              // reference mesh = T / 2^ref
    InitialLaw i0law;
    int threads = 0;
};

/// Simulates one fine-grid system and re-runs it on each coarse dyadic grid
/// with the same Brownian increments summed over coarse steps; reports the
/// strong terminal errors against the fine reference and their fitted rate.
RateFit run_convergence_study(const ConvergenceSpec& spec);

struct LyapunovEstimate {
    std::vector<double> slopes;  // per retained particle
    double median = 0.0;
    std::int64_t excluded = 0;  // particles leaving (0, N] on the window
};

/// Per-particle least-squares slope of log I_t over the window, aggregated
/// by the median. Requires stored paths.
LyapunovEstimate estimate_lyapunov(const SimulationOutput& output, double window_start,
                                   double window_end);

/// Builds the configured model for a given interaction value (presets that
/// have no alpha ignore it).
GeneralModel model_from_config(const ModelConfig& model, double alpha);

LimitData limits_from_config(const ModelConfig& model, double alpha);
Family family_from_config(const ModelConfig& model);

/// Runs one experiment end to end and returns the written files.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

} // namespace mvsis

#endif
