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
#include "mvsis/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mvsis/engine.hpp"
#include "mvsis/measures.hpp"

namespace mvsis {

namespace {

TimeFunction tf_product(const TimeFunction& a, const TimeFunction& b) {
    if (a.is_constant() && b.is_constant())
        return TimeFunction(*a.constant_value() * *b.constant_value());
    return TimeFunction([a, b](double t) { return a(t) * b(t); }, a.bound() * b.bound());
}

TimeFunction tf_scale(double s, const TimeFunction& a) {
    if (a.is_constant()) return TimeFunction(s * *a.constant_value());
    return TimeFunction([s, a](double t) { return s * a(t); }, std::abs(s) * a.bound());
}

void require_nonnegative_on(const TimeFunction& f, const char* name) {
    // Nonnegativity of rate functions is the caller's contract; constants are
    // validated here, time-varying rates at the grid in check_conditions.
    if (f.is_constant() && *f.constant_value() < 0.0)
        throw std::invalid_argument(std::string(name) + " must be nonnegative");
}

} // namespace

PowerSumDiffusion::PowerSumDiffusion(int rows, int terms, std::vector<PowerSumTerm> grid)
    : rows_(rows), terms_(terms), grid_(std::move(grid)) {
    if (rows_ < 0 || terms_ < 0 ||
        grid_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(terms_))
        throw std::invalid_argument("PowerSumDiffusion: grid shape mismatch");
    for (const auto& term : grid_) {
        if (!(term.zeta >= 0.5) || !(term.eta >= 0.5))
            throw std::invalid_argument("PowerSumDiffusion: exponents must be >= 1/2");
    }
}

bool PowerSumDiffusion::lipschitz_exponents() const {
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < terms_; ++j)
            if (term_active(i, j) && (at(i, j).zeta < 1.0 || at(i, j).eta < 1.0)) return false;
    return true;
}

void PowerSumDiffusion::eval_rows(double t, double x, double y_minus_x,
                                  std::span<double> out) const {
    const double xp = std::max(x, 0.0);
    const double yp = std::max(y_minus_x, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double row = 0.0;
        for (int j = 0; j < terms_; ++j) {
            const auto& term = at(i, j);
            const double g = term.g(t);
            if (g != 0.0) row += g * power_term(xp, term.zeta) * power_term(yp, term.eta);
        }
        out[static_cast<std::size_t>(i)] = row;
    }
}

GeneralModel::GeneralModel(std::vector<DriftCoefficient> drift_coeffs,
                           PowerSumDiffusion diffusion, PopulationFunction population,
                           std::string id)
    : drift_coeffs_(std::move(drift_coeffs)),
      diffusion_(std::move(diffusion)),
      population_(std::move(population)),
      id_(std::move(id)) {
    if (drift_coeffs_.size() < 2)
        throw std::invalid_argument("GeneralModel: drift degree must be at least 1");
    for (const auto& c : drift_coeffs_)
        if (!c) throw std::invalid_argument("GeneralModel: empty drift coefficient");
}

void GeneralModel::drift_coefficients(double t, const MeasureStats& stats,
                                      std::span<double> out) const {
    drift_coefficients_at(t, population_.size(t), stats, out);
}

void GeneralModel::drift_coefficients_at(double t, double n, const MeasureStats& stats,
                                         std::span<double> out) const {
    for (std::size_t i = 0; i < drift_coeffs_.size(); ++i) {
        out[i] = drift_coeffs_[i](t, n, stats);
        if (!std::isfinite(out[i]))
            throw std::domain_error("drift coefficient " + std::to_string(i) +
                                    " is non-finite at t = " + std::to_string(t));
    }
}

double GeneralModel::drift(double t, double x, const MeasureStats& stats) const {
    const double n = population_.size(t);
    const double xc = std::min(std::max(x, 0.0), n);
    double value = 0.0;
    for (std::size_t i = drift_coeffs_.size(); i-- > 0;) {
        const double b = drift_coeffs_[i](t, n, stats);
        if (!std::isfinite(b))
            throw std::domain_error("drift coefficient " + std::to_string(i) +
                                    " is non-finite at t = " + std::to_string(t));
        value = value * xc + b;
    }
    return value;
}

std::vector<double> GeneralModel::diffusion(double t, double x) const {
    std::vector<double> rows(static_cast<std::size_t>(diffusion_.rows()));
    diffusion(t, x, rows);
    return rows;
}

void GeneralModel::diffusion(double t, double x, std::span<double> out) const {
    const double n = population_.size(t);
    diffusion_.eval_rows(t, x, n - x, out);
    for (double v : out)
        if (!std::isfinite(v))
            throw std::domain_error("diffusion row non-finite at t = " + std::to_string(t));
}

MeasureStats GeneralModel::stats_of(double t, double n,
                                    std::span<const double> clipped_sorted) const {
    if (stats_) return stats_(t, n, clipped_sorted);
    MeasureStats stats;
    stats.mean = pairwise_sum(clipped_sorted) / static_cast<double>(clipped_sorted.size());
    return stats;
}

GeneralModel build_representative(RepresentativeParams params) {
    if (params.eta0 != 0.5 && params.eta0 != 1.0)
        throw std::invalid_argument("representative model: eta0 must be 1/2 or 1");
    require_nonnegative_on(params.beta0, "beta0");
    require_nonnegative_on(params.beta, "beta");
    require_nonnegative_on(params.gamma, "gamma");
    require_nonnegative_on(params.mu, "mu");

    const auto beta0 = params.beta0;
    const auto beta = params.beta;
    const auto beta1 = params.beta1;
    const auto gamma = params.gamma;
    const auto mu = params.mu;
    const auto c12 = params.c12;
    const auto c21 = params.c21;
    const auto c22 = params.c22;

    std::vector<DriftCoefficient> coeffs;
    coeffs.push_back([beta0](double t, double n, const MeasureStats& s) {
        return beta0(t) * s.mean * n;
    });
    coeffs.push_back([beta0, beta, beta1, gamma, mu, c12](double t, double n,
                                                          const MeasureStats& s) {
        return -(mu(t) + gamma(t)) + (beta1(t) - beta0(t)) * s.mean + beta(t) * n +
               c12(t) * n * n;
    });
    coeffs.push_back([beta, beta1, c21, c22](double t, double n, const MeasureStats& s) {
        const double interaction = n > 0.0 ? -beta1(t) * s.mean / n : 0.0;
        return interaction - beta(t) + c21(t) * n + c22(t) * n * n;
    });
    coeffs.push_back([c12, c21, c22](double t, double n, const MeasureStats&) {
        return -c12(t) - c21(t) - c22(t) * n;
    });

    std::vector<PowerSumTerm> grid;
    grid.push_back({params.g11, 1.0, 1.0});
    grid.push_back({params.g12, 1.0, params.eta0});
    grid.push_back({params.g21, 1.0, params.eta0});
    grid.push_back({TimeFunction(0.0), 1.0, params.eta0});
    PowerSumDiffusion diffusion(2, 2, std::move(grid));

    GeneralModel model(std::move(coeffs), std::move(diffusion), params.N, "representative");
    model.with_representative(std::move(params));
    return model;
}

GeneralModel build_tractable(TractableParams params) {
    if (!params.phi0 || !params.phi1 || !params.phi2)
        throw std::invalid_argument("tractable model: phi0..phi2 required");
    for (double z : params.zeta)
        if (!(z >= 1.0)) throw std::invalid_argument("tractable model: zeta must be >= 1");

    const auto c0 = params.c0;
    const auto c11 = params.c11;
    const auto c12 = params.c12;
    const auto c21 = params.c21;
    const auto c22 = params.c22;

    std::vector<DriftCoefficient> coeffs;
    coeffs.push_back([c0](double t, double n, const MeasureStats& s) {
        return c0(t) + n * (*s.phi_means)[0];
    });
    coeffs.push_back([c11, c12](double t, double n, const MeasureStats& s) {
        return (*s.phi_means)[1] + c11(t) * n + c12(t) * n * n;
    });
    coeffs.push_back([c11, c21, c22](double t, double n, const MeasureStats& s) {
        const double interaction = n > 0.0 ? (*s.phi_means)[2] / n : 0.0;
        return interaction - c11(t) + c21(t) * n + c22(t) * n * n;
    });
    coeffs.push_back([c12, c21, c22](double t, double n, const MeasureStats&) {
        return -c12(t) - c21(t) - c22(t) * n;
    });

    std::vector<PowerSumTerm> grid;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            grid.push_back({params.g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                            params.zeta[static_cast<std::size_t>(i)],
                            params.eta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
    PowerSumDiffusion diffusion(2, 2, std::move(grid));

    const auto phi0 = params.phi0;
    const auto phi1 = params.phi1;
    const auto phi2 = params.phi2;
    StatsEvaluator stats = [phi0, phi1, phi2](double t, double, std::span<const double> atoms) {
        MeasureStats s;
        const auto count = static_cast<double>(atoms.size());
        std::vector<double> scratch(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) scratch[i] = atoms[i];
        s.mean = pairwise_sum(scratch) / count;
        std::array<double, 3> means{};
        const std::array<const std::function<double(double, double)>*, 3> phis{&phi0, &phi1,
                                                                               &phi2};
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < atoms.size(); ++i) scratch[i] = (*phis[k])(t, atoms[i]);
            means[k] = pairwise_sum(scratch) / count;
        }
        s.phi_means = means;
        return s;
    };

    GeneralModel model(std::move(coeffs), std::move(diffusion), params.N, "tractable");
    model.with_tractable(std::move(params)).with_stats(std::move(stats));
    return model;
}

RepresentativeParams simulated_as_representative(const SimulatedModelParams& p) {
    if (!(p.N > 0.0)) throw std::invalid_argument("simulated model: N must be positive");
    if (!(p.beta >= 0.0 && p.gamma >= 0.0 && p.mu >= 0.0 && p.sigma >= 0.0))
        throw std::invalid_argument("simulated model: rates must be nonnegative");
    if (!(p.alpha >= -1.0)) throw std::invalid_argument("simulated model: alpha must be >= -1");
    if (!(p.i0 > 0.0 && p.i0 < p.N))
        throw std::invalid_argument("simulated model: i0 must lie in (0, N)");
    RepresentativeParams rep;
    rep.beta = p.beta;
    rep.beta1 = p.alpha * p.beta;
    rep.gamma = p.gamma;
    rep.mu = p.mu;
    rep.g11 = p.sigma;
    rep.eta0 = 1.0;
    rep.N = PopulationFunction::constant(p.N);
    return rep;
}

GeneralModel build_simulated(const SimulatedModelParams& p) {
    RepresentativeParams rep = simulated_as_representative(p);
    const double beta = p.beta;
    const double beta1 = p.alpha * p.beta;
    const double mg = p.mu + p.gamma;

    std::vector<DriftCoefficient> coeffs;
    coeffs.push_back([](double, double, const MeasureStats&) { return 0.0; });
    coeffs.push_back([beta, beta1, mg](double, double n, const MeasureStats& s) {
        return -mg + beta1 * s.mean + beta * n;
    });
    coeffs.push_back([beta, beta1](double, double n, const MeasureStats& s) {
        return -beta1 * s.mean / n - beta;
    });
    coeffs.push_back([](double, double, const MeasureStats&) { return 0.0; });

    std::vector<PowerSumTerm> grid;
    grid.push_back({TimeFunction(p.sigma), 1.0, 1.0});
    PowerSumDiffusion diffusion(1, 1, std::move(grid));

    GeneralModel model(std::move(coeffs), std::move(diffusion),
                       PopulationFunction::constant(p.N), "gghmp");
    model.with_representative(std::move(rep));
    return model;
}

GeneralModel build_wang(const WangParams& p) {
    if (!(p.theta > 0.0) || !(p.xi > 0.0))
        throw std::invalid_argument("wang model: theta and xi must be positive");
    if (!(p.beta_eq >= 0.0 && p.beta_start >= 0.0))
        throw std::invalid_argument("wang model: transmission rates must be nonnegative");
    RepresentativeParams rep;
    const double be = p.beta_eq;
    const double bs = p.beta_start;
    const double theta = p.theta;
    const double xi = p.xi;
    rep.beta = TimeFunction([be, bs, theta](double t) { return be + (bs - be) * std::exp(-theta * t); },
                            std::max(be, bs));
    rep.beta1 = p.beta1;
    rep.gamma = p.gamma;
    rep.mu = p.mu;
    rep.g11 = TimeFunction(
        [xi, theta](double t) { return xi / std::sqrt(2.0 * theta) * std::sqrt(1.0 - std::exp(-2.0 * theta * t)); },
        xi / std::sqrt(2.0 * theta));
    rep.eta0 = 1.0;
    rep.N = p.N;
    return build_representative(std::move(rep)).with_id("wang");
}

GeneralModel build_cai(const CaiParams& p) {
    RepresentativeParams rep;
    rep.beta = p.beta;
    rep.beta1 = p.beta1;
    rep.gamma = p.gamma;
    rep.mu = p.mu;
    rep.g11 = tf_product(p.a1, p.sigma1);
    rep.g12 = tf_scale(-1.0, tf_product(p.a2, p.sigma2));
    rep.g21 = tf_scale(-1.0, tf_product(p.a3, p.sigma2));
    rep.eta0 = 0.5;
    rep.N = p.N;
    return build_representative(std::move(rep)).with_id("cai");
}

GeneralModel build_bernardi(const BernardiParams& p) {
    RepresentativeParams rep;
    rep.beta = p.beta;
    rep.beta1 = p.beta1;
    rep.gamma = p.gamma;
    rep.mu = p.mu;
    rep.c12 = tf_scale(0.5, tf_product(p.sigma, p.sigma));
    rep.c21 = tf_scale(-1.5, tf_product(p.sigma, p.sigma));
    rep.g11 = p.sigma;
    rep.eta0 = 1.0;
    rep.N = p.N;
    return build_representative(std::move(rep)).with_id("bernardi");
}

namespace {

// Sub-Lipschitz double sums over the diffusion grid: pairs whose zeta
// (resp. eta) exponents sum below 2 contribute (g g)^+ weighted by the
// complementary power of N.
struct SubLipschitzSums {
    double zeta_side = 0.0;  // pairs with zeta_{j1} + zeta_{j2} < 2
    double eta_side = 0.0;   // pairs with eta_{j1} + eta_{j2} < 2
};

SubLipschitzSums sub_lipschitz_sums(const PowerSumDiffusion& noise, double t, double n) {
    SubLipschitzSums sums;
    for (int i = 0; i < noise.rows(); ++i)
        for (int j1 = 0; j1 < noise.terms(); ++j1)
            for (int j2 = 0; j2 < noise.terms(); ++j2) {
                const auto& t1 = noise.at(i, j1);
                const auto& t2 = noise.at(i, j2);
                const double gg = std::max(t1.g(t) * t2.g(t), 0.0);
                if (gg == 0.0) continue;
                if (t1.zeta + t2.zeta < 2.0)
                    sums.zeta_side += 0.5 * gg * power_term(n, t1.eta + t2.eta);
                if (t1.eta + t2.eta < 2.0)
                    sums.eta_side += 0.5 * gg * power_term(n, t1.zeta + t2.zeta);
            }
    return sums;
}

struct PhiEnvelope {
    double min_phi0 = 0.0;  // min over x in [0, N] of phi0
    double max_sum = 0.0;   // max over x in [0, N] of phi0 + phi1 + phi2
    double c0 = 0.0;
};

PhiEnvelope phi_envelope(const GeneralModel& model, double t, double n) {
    PhiEnvelope env;
    if (model.representative()) {
        const auto& rep = *model.representative();
        env.min_phi0 = std::min(0.0, rep.beta0(t) * n);
        env.max_sum = -(rep.mu(t) + rep.gamma(t));  // the phi sum is x-free here
        env.c0 = 0.0;
        return env;
    }
    const auto& tract = *model.tractable();
    env.c0 = tract.c0(t);
    constexpr int kSamples = 64;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (int s = 0; s <= kSamples; ++s) {
        const double x = n * static_cast<double>(s) / kSamples;
        mn = std::min(mn, tract.phi0(t, x));
        mx = std::max(mx, tract.phi0(t, x) + tract.phi1(t, x) + tract.phi2(t, x));
    }
    env.min_phi0 = mn;
    env.max_sum = mx;
    return env;
}

void record(ConditionEntry& entry, bool ok, double t) {
    if (!ok && entry.holds) {
        entry.holds = false;
        entry.first_violation = t;
    }
}

} // namespace

PopulationCheck verify_population(const PopulationFunction& population, const Partition& grid) {
    PopulationCheck check;
    const double horizon = grid.horizon();
    for (double t : grid.times()) {
        const double n = population.size(t);
        record(check.positivity, std::isfinite(n) && n > 0.0, t);
        if (t >= horizon) continue;
        // defect(h)/h must shrink with h for dN to be the derivative
        const double h = std::min(grid.mesh(), horizon - t);
        const double defect = [&](double step) {
            return std::abs(population.size(t + step) - n - population.derivative(t) * step) / step;
        }(h);
        const double refined = std::abs(population.size(t + 0.25 * h) - n -
                                        population.derivative(t) * 0.25 * h) /
                               (0.25 * h);
        const double scale = 1.0 + std::abs(n);
        record(check.derivative, refined <= 0.5 * defect + 1e-8 * scale, t);
    }
    return check;
}

ConditionReport check_conditions(const GeneralModel& model, const Partition& grid) {
    if (!model.representative() && !model.tractable())
        throw std::invalid_argument("check_conditions: analytic model structure required");

    ConditionReport report;
    const auto& noise = model.noise();

    bool exponents_ok = true;
    for (int i = 0; i < noise.rows(); ++i)
        for (int j = 0; j < noise.terms(); ++j)
            exponents_ok = exponents_ok && noise.at(i, j).zeta >= 0.5 && noise.at(i, j).eta >= 0.5;
    report.exponents_in_range.holds = exponents_ok;
    report.lipschitz_exponents.holds = noise.lipschitz_exponents();

    std::vector<double> rows(static_cast<std::size_t>(noise.rows()));
    for (double t : grid.times()) {
        const double n = model.population().size(t);
        const double dn = model.population().derivative(t);

        if (model.representative()) {
            const auto& rep = *model.representative();
            record(report.rates_nonnegative,
                   rep.beta0(t) >= 0.0 && rep.beta(t) >= 0.0 && rep.gamma(t) >= 0.0 &&
                       rep.mu(t) >= 0.0,
                   t);
        }

        noise.eval_rows(t, 0.0, n, rows);
        bool vanishes = std::all_of(rows.begin(), rows.end(), [](double v) { return v == 0.0; });
        noise.eval_rows(t, n, 0.0, rows);
        vanishes = vanishes &&
                   std::all_of(rows.begin(), rows.end(), [](double v) { return v == 0.0; });
        record(report.boundary_vanishing, vanishes, t);

        const PhiEnvelope env = phi_envelope(model, t, n);
        const double boundary_drift = env.c0 + env.max_sum * n;  // sup over laws of the drift at x = N
        const SubLipschitzSums sums = sub_lipschitz_sums(noise, t, n);
        record(report.value_condition, dn >= boundary_drift, t);
        record(report.strict_value_condition, dn >= boundary_drift + sums.eta_side, t);

        // Interior non-attainability: sub-Lipschitz terms must be dominated
        // by the drift at both boundaries.
        const double min_b0 = env.c0 + n * env.min_phi0;
        record(report.power_sum_condition,
               sums.zeta_side <= min_b0 && sums.eta_side <= dn - boundary_drift, t);
    }
    return report;
}

} // namespace mvsis
