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
#ifndef MVSIS_ENGINE_HPP
#define MVSIS_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvsis/model.hpp"
#include "mvsis/rng.hpp"

namespace mvsis {

/// Strictly increasing time grid 0 = t_0 < ... < t_k = T.
class Partition {
public:
    /// Equidistant grid; the mesh is exactly T/steps.
    static Partition equidistant(double horizon, std::int64_t steps);

    /// Validates monotonicity and the endpoints t_0 = 0, t_last = T.
    static Partition from_times(std::vector<double> times);

    /// Keeps every stride-th node; steps() must be divisible by stride.
    Partition coarsen(std::int64_t stride) const;

    const std::vector<double>& times() const { return times_; }
    std::int64_t steps() const { return static_cast<std::int64_t>(times_.size()) - 1; }
    double horizon() const { return times_.back(); }
    double mesh() const { return mesh_; }
    double node(std::int64_t j) const { return times_[static_cast<std::size_t>(j)]; }
    double dt(std::int64_t j) const {
        return times_[static_cast<std::size_t>(j + 1)] - times_[static_cast<std::size_t>(j)];
    }

private:
    std::vector<double> times_;
    double mesh_ = 0.0;
};

/// Source of Brownian data for the scheme. increment(l, i, j) is the
/// coordinate-i increment of particle l over step j, distributed
/// N(0, dt_j); bridge_normal supplies the standard normal of the
/// interpolation substream. Both are pure functions of their arguments and
/// the seed, so results do not depend on evaluation order or worker count.
class IncrementSource {
public:
    virtual ~IncrementSource() = default;
    virtual double increment(std::int64_t particle, int coord, std::int64_t step) const = 0;
    virtual double bridge_normal(std::int64_t particle, int coord, std::int64_t step) const = 0;
};

/// Counter-based driver over a fixed partition.
class BrownianDriver final : public IncrementSource {
public:
    BrownianDriver(std::uint64_t seed, const Partition& grid);

    double increment(std::int64_t particle, int coord, std::int64_t step) const override;
    double bridge_normal(std::int64_t particle, int coord, std::int64_t step) const override;

    std::uint64_t seed() const { return rng_.seed(); }

private:
    CounterRng rng_;
    std::vector<double> sqrt_dt_;
};

/// Aggregates a finer driver: one coarse increment is the sum of `stride`
/// consecutive fine increments, which couples runs across dyadic meshes.
class CoarsenedDriver final : public IncrementSource {
public:
    CoarsenedDriver(const IncrementSource& fine, std::int64_t stride)
        : fine_(fine), stride_(stride) {
        if (stride <= 0) throw std::invalid_argument("CoarsenedDriver: stride must be positive");
    }

    double increment(std::int64_t particle, int coord, std::int64_t step) const override {
        double sum = 0.0;
        for (std::int64_t s = 0; s < stride_; ++s)
            sum += fine_.increment(particle, coord, step * stride_ + s);
        return sum;
    }

    double bridge_normal(std::int64_t, int, std::int64_t) const override {
        throw std::logic_error("CoarsenedDriver: no bridge substream");
    }

private:
    const IncrementSource& fine_;
    std::int64_t stride_;
};

using InitialLaw = std::function<double(std::int64_t particle)>;

inline InitialLaw constant_initial(double i0) {
    return [i0](std::int64_t) { return i0; };
}

/// Raised when a particle state becomes non-finite; carries the step index.
class NumericAbort : public std::runtime_error {
public:
    NumericAbort(std::string what, std::int64_t step)
        : std::runtime_error(std::move(what)), step_(step) {}
    std::int64_t step() const { return step_; }

private:
    std::int64_t step_;
};

struct SimOptions {
    /// -1: store every particle path; 0: none; k > 0: the first k particles.
    std::int64_t store_paths = -1;
    /// 0: use MVSIS_THREADS or the hardware default.
    int threads = 0;
};

struct SimulationMeta {
    std::uint64_t seed = 0;
    std::string model_id;
    double wall_seconds = 0.0;
};

struct SimulationOutput {
    Partition grid;
    std::int64_t particle_count = 0;
    /// Indices of the particles whose full paths are stored.
    std::vector<std::int64_t> stored_particles;
    /// paths[r][j]: state of stored particle r at node j.
    std::vector<std::vector<double>> paths;
    /// Signed mean of the clipped empirical measure at every node.
    std::vector<double> empirical_means;
    /// Population size N(t_j) at every node.
    std::vector<double> population;
    /// Full per-node statistics (drives drift freezing and interpolation).
    std::vector<MeasureStats> step_stats;
    /// Terminal states of all particles.
    std::vector<double> final_values;
    /// Particle-steps observed outside [0, N(t)].
    std::int64_t exit_events = 0;
    SimulationMeta meta;

    const std::vector<double>& path(std::int64_t particle) const;
};

/// Explicit scheme for the interacting particle system: every particle
/// advances one step with drift frozen at the clipped per-step empirical
/// measure of all particles, then the measure is rebuilt. Updates within a
/// step run in parallel; the measure reduction uses a fixed summation tree,
/// so outputs are independent of the worker count.
SimulationOutput simulate_particles(const GeneralModel& model, const Partition& grid,
                                    std::int64_t particles, std::uint64_t seed,
                                    const InitialLaw& i0law, const SimOptions& opts = {});

/// Same scheme with a caller-supplied increment source (used for coupling
/// across meshes).
SimulationOutput simulate_particles(const GeneralModel& model, const Partition& grid,
                                    std::int64_t particles, const IncrementSource& driver,
                                    std::uint64_t seed_label, const InitialLaw& i0law,
                                    const SimOptions& opts = {});

/// Runs one simulation per model against bit-identical increments. All
/// models must share the noise dimension; differences between outputs are
/// purely model-induced.
std::vector<SimulationOutput> coupled_sweep(std::span<const GeneralModel> models,
                                            const Partition& grid, std::int64_t particles,
                                            std::uint64_t seed, const InitialLaw& i0law,
                                            const SimOptions& opts = {});

/// Value of the interpolated scheme at an off-grid time: the grid state plus
/// the frozen drift over (t - t_j) and the frozen diffusion against
/// W_t - W_{t_j}, replayed from the bridge substream. Agrees with the grid
/// values at the nodes exactly.
double interpolated_value(const SimulationOutput& output, const GeneralModel& model,
                          std::int64_t particle, double t);

/// Worker count: explicit option, else MVSIS_THREADS, else hardware default.
int resolve_threads(int requested);

} // namespace mvsis

#endif
