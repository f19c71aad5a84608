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
#include "mvsis/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "mvsis/measures.hpp"

namespace mvsis {

Partition Partition::equidistant(double horizon, std::int64_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("Partition: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("Partition: at least one step required");
    Partition grid;
    grid.times_.resize(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t j = 0; j <= steps; ++j)
        grid.times_[static_cast<std::size_t>(j)] =
            horizon * static_cast<double>(j) / static_cast<double>(steps);
    grid.times_.back() = horizon;
    grid.mesh_ = horizon / static_cast<double>(steps);
    return grid;
}

Partition Partition::from_times(std::vector<double> times) {
    if (times.size() < 2) throw std::invalid_argument("Partition: need at least two nodes");
    if (times.front() != 0.0) throw std::invalid_argument("Partition: must start at 0");
    double mesh = 0.0;
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dt = times[j] - times[j - 1];
        if (!(dt > 0.0)) throw std::invalid_argument("Partition: times must increase strictly");
        mesh = std::max(mesh, dt);
    }
    Partition grid;
    grid.times_ = std::move(times);
    grid.mesh_ = mesh;
    return grid;
}

Partition Partition::coarsen(std::int64_t stride) const {
    if (stride < 1 || steps() % stride != 0)
        throw std::invalid_argument("Partition: stride must divide the step count");
    std::vector<double> coarse;
    coarse.reserve(static_cast<std::size_t>(steps() / stride) + 1);
    for (std::int64_t j = 0; j <= steps(); j += stride)
        coarse.push_back(times_[static_cast<std::size_t>(j)]);
    return from_times(std::move(coarse));
}

BrownianDriver::BrownianDriver(std::uint64_t seed, const Partition& grid) : rng_(seed) {
    sqrt_dt_.resize(static_cast<std::size_t>(grid.steps()));
    for (std::int64_t j = 0; j < grid.steps(); ++j)
        sqrt_dt_[static_cast<std::size_t>(j)] = std::sqrt(grid.dt(j));
}

double BrownianDriver::increment(std::int64_t particle, int coord, std::int64_t step) const {
    return sqrt_dt_[static_cast<std::size_t>(step)] *
           rng_.normal(static_cast<std::uint64_t>(particle), static_cast<std::uint32_t>(coord),
                       static_cast<std::uint64_t>(step), 0);
}

double BrownianDriver::bridge_normal(std::int64_t particle, int coord, std::int64_t step) const {
    return rng_.normal(static_cast<std::uint64_t>(particle), static_cast<std::uint32_t>(coord),
                       static_cast<std::uint64_t>(step), 1);
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("MVSIS_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed >= 1) return static_cast<int>(std::min(parsed, 256L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

const std::vector<double>& SimulationOutput::path(std::int64_t particle) const {
    const auto it =
        std::lower_bound(stored_particles.begin(), stored_particles.end(), particle);
    if (it == stored_particles.end() || *it != particle)
        throw std::invalid_argument("SimulationOutput: path of particle " +
                                    std::to_string(particle) + " not stored");
    return paths[static_cast<std::size_t>(it - stored_particles.begin())];
}

namespace {

// One scheme step shared with the interpolation path so that node values
// agree bit-exactly.
inline double advance(double x, double drift, double dt, std::span<const double> rows,
                      std::span<const double> noise) {
    double dx = drift * dt;
    for (std::size_t i = 0; i < rows.size(); ++i) dx += rows[i] * noise[i];
    return x + dx;
}

// Static chunking over [0, count); chunk boundaries depend only on the
// worker count, and no worker writes outside its chunk.
template <typename Fn>
void parallel_chunks(std::int64_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count < 4096) {
        fn(std::int64_t{0}, count);
        return;
    }
    const std::int64_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) {
        const std::int64_t lo = std::min<std::int64_t>(count, w * chunk);
        const std::int64_t hi = std::min<std::int64_t>(count, (w + 1) * chunk);
        if (lo < hi) pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    fn(std::int64_t{0}, std::min<std::int64_t>(count, chunk));
    for (auto& t : pool) t.join();
}

struct FlatNoise {
    int rows = 0;
    int terms = 0;
    std::vector<double> zeta;
    std::vector<double> eta;
    std::vector<double> g_values;  // refreshed each step

    explicit FlatNoise(const PowerSumDiffusion& noise)
        : rows(noise.rows()), terms(noise.terms()) {
        zeta.resize(static_cast<std::size_t>(rows * terms));
        eta.resize(zeta.size());
        g_values.resize(zeta.size());
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < terms; ++j) {
                zeta[static_cast<std::size_t>(i * terms + j)] = noise.at(i, j).zeta;
                eta[static_cast<std::size_t>(i * terms + j)] = noise.at(i, j).eta;
            }
    }

    void refresh(const PowerSumDiffusion& noise, double t) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < terms; ++j)
                g_values[static_cast<std::size_t>(i * terms + j)] = noise.at(i, j).g(t);
    }

    void eval(double x, double y_minus_x, std::span<double> out) const {
        const double xp = std::max(x, 0.0);
        const double yp = std::max(y_minus_x, 0.0);
        for (int i = 0; i < rows; ++i) {
            double row = 0.0;
            for (int j = 0; j < terms; ++j) {
                const std::size_t k = static_cast<std::size_t>(i * terms + j);
                const double g = g_values[k];
                if (g != 0.0) row += g * power_term(xp, zeta[k]) * power_term(yp, eta[k]);
            }
            out[static_cast<std::size_t>(i)] = row;
        }
    }
};

MeasureStats step_statistics(const GeneralModel& model, double t, double n,
                             std::span<const double> states, std::vector<double>& scratch) {
    scratch.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        scratch[i] = std::min(std::max(states[i], 0.0), n);
    std::sort(scratch.begin(), scratch.end());
    return model.stats_of(t, n, scratch);
}

} // namespace

SimulationOutput simulate_particles(const GeneralModel& model, const Partition& grid,
                                    std::int64_t particles, const IncrementSource& driver,
                                    std::uint64_t seed_label, const InitialLaw& i0law,
                                    const SimOptions& opts) {
    if (particles < 1) throw std::invalid_argument("simulate_particles: need at least one particle");
    if (!i0law) throw std::invalid_argument("simulate_particles: initial law required");

    const auto start = std::chrono::steady_clock::now();
    const int workers = resolve_threads(opts.threads);
    const int dim = model.noise_dim();
    const std::int64_t steps = grid.steps();

    SimulationOutput out;
    out.grid = grid;
    out.particle_count = particles;
    out.meta.seed = seed_label;
    out.meta.model_id = model.id();

    const double n0 = model.population().size(0.0);
    std::vector<double> states(static_cast<std::size_t>(particles));
    for (std::int64_t l = 0; l < particles; ++l) {
        const double x0 = i0law(l);
        if (!std::isfinite(x0) || x0 < 0.0 || x0 > n0)
            throw std::invalid_argument("simulate_particles: initial state outside [0, N(0)]");
        states[static_cast<std::size_t>(l)] = x0;
    }

    const std::int64_t stored =
        opts.store_paths < 0 ? particles : std::min(opts.store_paths, particles);
    out.stored_particles.resize(static_cast<std::size_t>(stored));
    out.paths.assign(static_cast<std::size_t>(stored),
                     std::vector<double>(static_cast<std::size_t>(steps) + 1));
    for (std::int64_t r = 0; r < stored; ++r) {
        out.stored_particles[static_cast<std::size_t>(r)] = r;
        out.paths[static_cast<std::size_t>(r)][0] = states[static_cast<std::size_t>(r)];
    }

    out.empirical_means.resize(static_cast<std::size_t>(steps) + 1);
    out.population.resize(static_cast<std::size_t>(steps) + 1);
    out.step_stats.resize(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t j = 0; j <= steps; ++j)
        out.population[static_cast<std::size_t>(j)] = model.population().size(grid.node(j));

    FlatNoise noise(model.noise());
    std::vector<double> scratch;
    std::vector<double> coeffs(static_cast<std::size_t>(model.degree()) + 1);
    std::atomic<std::int64_t> exits{0};
    std::atomic<std::int64_t> first_bad_step{-1};

    for (std::int64_t j = 0; j < steps; ++j) {
        const double t = grid.node(j);
        const double n = model.population().size(t);
        const MeasureStats stats = step_statistics(model, t, n, states, scratch);
        out.step_stats[static_cast<std::size_t>(j)] = stats;
        out.empirical_means[static_cast<std::size_t>(j)] = stats.mean;

        model.drift_coefficients(t, stats, coeffs);
        noise.refresh(model.noise(), t);
        const double dt = grid.dt(j);
        const double n_next = model.population().size(grid.node(j + 1));
        const std::span<const double> b(coeffs);

        parallel_chunks(particles, workers, [&](std::int64_t lo, std::int64_t hi) {
            std::vector<double> rows(static_cast<std::size_t>(dim));
            std::vector<double> dw(static_cast<std::size_t>(dim));
            std::int64_t local_exits = 0;
            for (std::int64_t l = lo; l < hi; ++l) {
                const double x = states[static_cast<std::size_t>(l)];
                const double xc = std::min(std::max(x, 0.0), n);
                double drift = 0.0;
                for (std::size_t i = b.size(); i-- > 0;) drift = drift * xc + b[i];
                noise.eval(x, n - x, rows);
                for (int i = 0; i < dim; ++i)
                    dw[static_cast<std::size_t>(i)] = driver.increment(l, i, j);
                const double next = advance(x, drift, dt, rows, dw);
                if (!std::isfinite(next)) {
                    std::int64_t expected = -1;
                    first_bad_step.compare_exchange_strong(expected, j);
                }
                if (next < 0.0 || next > n_next) ++local_exits;
                states[static_cast<std::size_t>(l)] = next;
            }
            exits.fetch_add(local_exits, std::memory_order_relaxed);
        });

        if (first_bad_step.load() >= 0)
            throw NumericAbort("particle state non-finite at step " + std::to_string(j),
                               first_bad_step.load());

        for (std::int64_t r = 0; r < stored; ++r)
            out.paths[static_cast<std::size_t>(r)][static_cast<std::size_t>(j + 1)] =
                states[static_cast<std::size_t>(r)];
    }

    const double t_end = grid.node(steps);
    const MeasureStats final_stats =
        step_statistics(model, t_end, model.population().size(t_end), states, scratch);
    out.step_stats[static_cast<std::size_t>(steps)] = final_stats;
    out.empirical_means[static_cast<std::size_t>(steps)] = final_stats.mean;
    out.final_values = std::move(states);
    out.exit_events = exits.load();
    out.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

SimulationOutput simulate_particles(const GeneralModel& model, const Partition& grid,
                                    std::int64_t particles, std::uint64_t seed,
                                    const InitialLaw& i0law, const SimOptions& opts) {
    const BrownianDriver driver(seed, grid);
    return simulate_particles(model, grid, particles, driver, seed, i0law, opts);
}

std::vector<SimulationOutput> coupled_sweep(std::span<const GeneralModel> models,
                                            const Partition& grid, std::int64_t particles,
                                            std::uint64_t seed, const InitialLaw& i0law,
                                            const SimOptions& opts) {
    if (models.empty()) throw std::invalid_argument("coupled_sweep: no models");
    for (const auto& m : models)
        if (m.noise_dim() != models.front().noise_dim())
            throw std::invalid_argument("coupled_sweep: noise dimensions differ");
    std::vector<SimulationOutput> outputs;
    outputs.reserve(models.size());
    const BrownianDriver driver(seed, grid);
    for (const auto& m : models)
        outputs.push_back(simulate_particles(m, grid, particles, driver, seed, i0law, opts));
    return outputs;
}

double interpolated_value(const SimulationOutput& output, const GeneralModel& model,
                          std::int64_t particle, double t) {
    const auto& times = output.grid.times();
    if (!(t >= 0.0) || t > output.grid.horizon())
        throw std::invalid_argument("interpolated_value: t outside [0, T]");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::int64_t j =
        std::min<std::int64_t>(static_cast<std::int64_t>(it - times.begin()) - 1,
                               output.grid.steps() - 1);

    const auto& path = output.path(particle);
    const double x = path[static_cast<std::size_t>(j)];
    const double tj = output.grid.node(j);
    const double dt = output.grid.dt(j);
    const double n = model.population().size(tj);

    std::vector<double> coeffs(static_cast<std::size_t>(model.degree()) + 1);
    model.drift_coefficients(tj, output.step_stats[static_cast<std::size_t>(j)], coeffs);
    const double xc = std::min(std::max(x, 0.0), n);
    double drift = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) drift = drift * xc + coeffs[i];

    const int dim = model.noise_dim();
    std::vector<double> rows(static_cast<std::size_t>(dim));
    model.noise().eval_rows(tj, x, n - x, rows);

    const BrownianDriver driver(output.meta.seed, output.grid);
    const double theta = (t - tj) / dt;
    std::vector<double> noise(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const double bridge_sd = std::sqrt(theta * (1.0 - theta) * dt);
        noise[static_cast<std::size_t>(i)] =
            theta * driver.increment(particle, i, j) +
            bridge_sd * driver.bridge_normal(particle, i, j);
    }
    return advance(x, drift, t - tj, rows, noise);
}

} // namespace mvsis
