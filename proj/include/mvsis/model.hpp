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
#ifndef MVSIS_MODEL_HPP
#define MVSIS_MODEL_HPP

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvsis/time_function.hpp"

namespace mvsis {

class Partition;

/// Statistics of the (clipped) per-step empirical measure that the drift
/// coefficients may depend on. The three named expectations are only
/// populated for models of the tractable class.
struct MeasureStats {
    double mean = 0.0;
    std::optional<std::array<double, 3>> phi_means;
};

/// One term g(t) * x^zeta * y^eta of a diffusion row.
struct PowerSumTerm {
    TimeFunction g;
    double zeta = 1.0;
    double eta = 1.0;
};

/// Diffusion coefficient built from sums of power functions, one row per
/// Brownian coordinate. All exponents must be >= 1/2; the Lipschitz regime
/// additionally requires every active exponent >= 1.
class PowerSumDiffusion {
public:
    PowerSumDiffusion() = default;
    PowerSumDiffusion(int rows, int terms, std::vector<PowerSumTerm> grid);

    int rows() const { return rows_; }
    int terms() const { return terms_; }
    const PowerSumTerm& at(int row, int term) const {
        return grid_[static_cast<std::size_t>(row * terms_ + term)];
    }

    /// A term is active when its declared bound is nonzero.
    bool term_active(int row, int term) const { return at(row, term).g.bound() > 0.0; }

    /// True when every active term has both exponents >= 1.
    bool lipschitz_exponents() const;

    /// Row values f_i(t, x^+, y^+) for raw x and y = N - x.
    void eval_rows(double t, double x, double y_minus_x, std::span<double> out) const;

private:
    int rows_ = 0;
    int terms_ = 0;
    std::vector<PowerSumTerm> grid_;
};

/// x^e for nonnegative base with fast paths for the exponents that occur in
/// the model family.
inline double power_term(double base, double e) {
    if (base <= 0.0) return 0.0;
    if (e == 1.0) return base;
    if (e == 0.5) return std::sqrt(base);
    if (e == 2.0) return base * base;
    if (e == 1.5) return base * std::sqrt(base);
    return std::pow(base, e);
}

using DriftCoefficient = std::function<double(double t, double n, const MeasureStats&)>;
using StatsEvaluator =
    std::function<MeasureStats(double t, double n, std::span<const double> clipped_sorted)>;

/// Coefficients of the representative family: transmission, recovery and
/// interaction rates plus the diffusion amplitudes. eta0 is the shared
/// exponent of the secondary diffusion terms and must be 1/2 or 1.
struct RepresentativeParams {
    TimeFunction beta0{0.0};
    TimeFunction beta{0.0};
    TimeFunction beta1{0.0};
    TimeFunction gamma{0.0};
    TimeFunction mu{0.0};
    TimeFunction c12{0.0};
    TimeFunction c21{0.0};
    TimeFunction c22{0.0};
    TimeFunction g11{0.0};
    TimeFunction g12{0.0};
    TimeFunction g21{0.0};
    double eta0 = 1.0;
    PopulationFunction N = PopulationFunction::constant(1.0);
};

/// Scalar parameters of the mean-field model used in the experiments:
/// transmission beta scaled by (1 + alpha E[I]/N), recovery gamma, death
/// rate mu, noise level sigma and constant population N.
struct SimulatedModelParams {
    double N = 100.0;
    double beta = 0.5;
    double gamma = 25.0;
    double mu = 20.0;
    double sigma = 0.08;
    double alpha = 0.0;
    double i0 = 50.0;
};

/// Time- and distribution-dependent variant with a mean-reverting
/// transmission rate beta(t) = beta_eq + (beta_start - beta_eq) e^{-theta t}.
struct WangParams {
    double beta_eq = 0.0;
    double beta_start = 0.0;
    double theta = 1.0;
    double xi = 0.0;
    TimeFunction beta1{0.0};
    TimeFunction gamma{0.0};
    TimeFunction mu{0.0};
    PopulationFunction N = PopulationFunction::constant(1.0);
};

/// Variant driven by two correlated noise sources with amplitudes
/// a1 s1 (N-I) and (a2, a3) s2 sqrt(N-I).
struct CaiParams {
    TimeFunction a1{0.0};
    TimeFunction a2{0.0};
    TimeFunction a3{0.0};
    TimeFunction sigma1{0.0};
    TimeFunction sigma2{0.0};
    TimeFunction beta{0.0};
    TimeFunction beta1{0.0};
    TimeFunction gamma{0.0};
    TimeFunction mu{0.0};
    PopulationFunction N = PopulationFunction::constant(1.0);
};

/// Wong-Zakai variant: adds the correction drift (1/2) s^2 I (N-I)(N-2I).
struct BernardiParams {
    TimeFunction sigma{0.0};
    TimeFunction beta{0.0};
    TimeFunction beta1{0.0};
    TimeFunction gamma{0.0};
    TimeFunction mu{0.0};
    PopulationFunction N = PopulationFunction::constant(1.0);
};

/// Cubic-drift class with law dependence through three expectations
/// E[phi_i(t, I)]. The Lipschitz moduli of the phi are declared, not
/// inferred.
struct TractableParams {
    TimeFunction c0{0.0};
    TimeFunction c11{0.0};
    TimeFunction c12{0.0};
    TimeFunction c21{0.0};
    TimeFunction c22{0.0};
    std::function<double(double, double)> phi0;  // (t, x)
    std::function<double(double, double)> phi1;
    std::function<double(double, double)> phi2;
    TimeFunction L0{0.0};  // Lipschitz modulus of phi0 in x
    TimeFunction L1{0.0};
    TimeFunction L2{0.0};
    std::array<double, 2> zeta{1.0, 1.0};
    std::array<std::array<double, 2>, 2> eta{{{1.0, 1.0}, {1.0, 1.0}}};
    std::array<std::array<TimeFunction, 2>, 2> g{{{TimeFunction(0.0), TimeFunction(0.0)},
                                                  {TimeFunction(0.0), TimeFunction(0.0)}}};
    PopulationFunction N = PopulationFunction::constant(1.0);
};

/// One-dimensional mean-field SIS model with polynomial drift
/// sum_i b_i(t, N(t), law) x^i and a power-sum diffusion. Drift arguments are
/// clipped to [0, N(t)]; the diffusion uses positive parts, so states may
/// leave [0, N] transiently under the explicit scheme.
class GeneralModel {
public:
    GeneralModel(std::vector<DriftCoefficient> drift_coeffs, PowerSumDiffusion diffusion,
                 PopulationFunction population, std::string id);

    int degree() const { return static_cast<int>(drift_coeffs_.size()) - 1; }
    int noise_dim() const { return diffusion_.rows(); }
    const std::string& id() const { return id_; }
    const PopulationFunction& population() const { return population_; }
    const PowerSumDiffusion& noise() const { return diffusion_; }

    /// Frozen drift coefficients b_i(t, N(t), stats); out.size() == degree()+1.
    void drift_coefficients(double t, const MeasureStats& stats, std::span<double> out) const;

    /// Coefficients at an explicit population argument.
    void drift_coefficients_at(double t, double n, const MeasureStats& stats,
                               std::span<double> out) const;

    /// Drift evaluated at the clipped state (x^+ ^ N(t)).
    double drift(double t, double x, const MeasureStats& stats) const;

    /// Diffusion rows f_i(t, x^+, (N(t)-x)^+).
    std::vector<double> diffusion(double t, double x) const;
    void diffusion(double t, double x, std::span<double> out) const;

    /// Per-step statistics of the clipped empirical measure. The input span
    /// must be clipped to [0, n] and sorted.
    MeasureStats stats_of(double t, double n, std::span<const double> clipped_sorted) const;

    bool needs_phi_means() const { return static_cast<bool>(stats_); }

    const std::optional<RepresentativeParams>& representative() const { return representative_; }
    const std::optional<TractableParams>& tractable() const { return tractable_; }

    GeneralModel& with_representative(RepresentativeParams p) {
        representative_ = std::move(p);
        return *this;
    }
    GeneralModel& with_tractable(TractableParams p) {
        tractable_ = std::move(p);
        return *this;
    }
    GeneralModel& with_stats(StatsEvaluator s) {
        stats_ = std::move(s);
        return *this;
    }
    GeneralModel& with_id(std::string id) {
        id_ = std::move(id);
        return *this;
    }

private:
    std::vector<DriftCoefficient> drift_coeffs_;
    PowerSumDiffusion diffusion_;
    PopulationFunction population_;
    std::string id_;
    StatsEvaluator stats_;  // empty: clipped mean only
    std::optional<RepresentativeParams> representative_;
    std::optional<TractableParams> tractable_;
};

GeneralModel build_representative(RepresentativeParams params);
GeneralModel build_tractable(TractableParams params);
GeneralModel build_simulated(const SimulatedModelParams& params);
GeneralModel build_wang(const WangParams& params);
GeneralModel build_cai(const CaiParams& params);
GeneralModel build_bernardi(const BernardiParams& params);

/// Translation of the simulated model into representative coefficients
/// (beta1 = alpha beta, single noise row with both exponents 1).
RepresentativeParams simulated_as_representative(const SimulatedModelParams& params);

/// Result of sampling the structural conditions on a grid. Value conditions
/// are checked at the grid times (and an x-grid over [0, N]); the first
/// violating time is recorded for every false entry.
struct ConditionEntry {
    bool holds = true;
    std::optional<double> first_violation;
};

struct ConditionReport {
    ConditionEntry exponents_in_range;       // all zeta, eta >= 1/2
    ConditionEntry lipschitz_exponents;      // all active exponents >= 1
    ConditionEntry boundary_vanishing;       // f(t, 0, y) = f(t, x, 0) = 0
    ConditionEntry value_condition;          // dN >= drift at the upper boundary
    ConditionEntry strict_value_condition;   // with the diffusion surcharge
    ConditionEntry power_sum_condition;      // interior non-attainability bound
    ConditionEntry rates_nonnegative;        // beta0, beta, gamma, mu >= 0 on the grid
};

ConditionReport check_conditions(const GeneralModel& model, const Partition& grid);

/// Samples the population contract on the grid: positivity of N and
/// first-order consistency of the declared derivative,
/// |N(t+h) - N(t) - dN(t) h| = o(h).
struct PopulationCheck {
    ConditionEntry positivity;
    ConditionEntry derivative;
};

PopulationCheck verify_population(const PopulationFunction& population, const Partition& grid);

} // namespace mvsis

#endif
