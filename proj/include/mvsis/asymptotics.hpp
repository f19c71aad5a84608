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
#ifndef MVSIS_ASYMPTOTICS_HPP
#define MVSIS_ASYMPTOTICS_HPP

#include <array>
#include <optional>
#include <string>

#include "mvsis/model.hpp"

namespace mvsis {

struct MaxResult {
    double value = 0.0;
    double argmax = 0.0;
};

/// max over [0, y] of a + b x + c x^2, by the closed three-case form.
MaxResult max_quadratic(double a, double b, double c, double y);

/// max over [0, y] of a + b x + d (y - x)^{3/2}.
MaxResult max_power32(double a, double b, double d, double y);

/// max over [0, y] of a + b x + c x^2 + d (y - x)^{3/2} for c < 0.
/// Delegates to max_quadratic / max_power32 when c >= 0 would be required.
MaxResult max_quartic_power(double a, double b, double c, double d, double y);

enum class ZeroSelect { Smallest, Largest };

/// Zero in (0, y] of f(x) = a + b x + c x^2 + d (y - x)^{3/2} under the
/// uniqueness cases: requires f(0) = a + d y^{3/2} > 0 and
///   d = 0 with (c <= 0 and f(y) <= 0) or (c > 0 and f(y) < 0), or
///   d != 0 with c <= 0 and f(y) < 0.
/// Closed form when d = 0 (numerically stable quadratic, with a linear
/// fallback for tiny c); bracketed bisection to 1e-12 otherwise. The
/// selector only matters in the boundary tie f(y) = 0 with c > 0.
double zero_of_f(double a, double b, double c, double d, double y,
                 ZeroSelect select = ZeroSelect::Smallest);

/// Transformed log-derivative function: drift shifted to x^{i-1} minus half
/// the squared relative noise. `parts` carries the closed-form coefficient
/// decomposition (constant, linear, quadratic in x) for representative
/// models; `power_coeff` multiplies (y-x)^{3/2} in the eta0 = 1/2 regime.
struct HEval {
    double value = 0.0;
    std::optional<std::array<double, 3>> parts;  // h1, h2, h3
    double power_coeff = 0.0;
    double b0 = 0.0;
};

/// Direct evaluation from the drift coefficients and diffusion (x > 0).
double h_general(const GeneralModel& model, double t, double x, double y,
                 const MeasureStats& stats);

/// Closed-form evaluation for representative models; supports x = 0 when
/// beta0 vanishes. Falls back to the direct form for models without
/// representative structure.
HEval h_eval(const GeneralModel& model, double t, double x, double y,
             const MeasureStats& stats);

enum class Family { Wang, Cai, Bernardi, Simulated };

/// Limits of the time-dependent coefficients. Auto-derivable for constant
/// coefficients; otherwise the user supplies them.
struct LimitData {
    double n_inf = 0.0;
    double mu_plus_gamma_inf = 0.0;
    double beta_inf = 0.0;
    double beta1_inf = 0.0;
    double g11_inf = 0.0;
    double g12_inf = 0.0;
    double g21_inf = 0.0;
    double c12_inf = 0.0;
    double c21_inf = 0.0;
    double c22_inf = 0.0;
    double eta0 = 1.0;
    /// Interaction correction constants; 0 is always admissible.
    double u_interaction = 0.0;
    double v_interaction = 0.0;
    /// Limit of beta1(t) E[I_t], e.g. estimated from a simulation.
    std::optional<double> mean_limit;
};

LimitData simulated_limits(const SimulatedModelParams& params);
LimitData wang_limits(const WangParams& params);
LimitData cai_limits(const CaiParams& params);
LimitData bernardi_limits(const BernardiParams& params);

/// Limits read off a representative model whose coefficients are constant.
LimitData auto_limits(const GeneralModel& model);

struct AsymptoticReport {
    enum class Verdict { Extinct, PersistAbove, PersistAround, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    /// Extinction rate exponent (1 = exponential).
    std::optional<double> rate;
    /// Lyapunov limit of log I_t / t under extinction.
    std::optional<double> h_inf;
    /// Lower persistence level (smallest zero of the asymptotic envelope).
    std::optional<double> level_x0;
    /// Upper level (largest zero of the upper envelope).
    std::optional<double> level_y0;
    std::optional<double> reproduction_ratio;
    /// Governing constant of the extinction criterion.
    std::optional<double> u;
    /// Sufficient-scenario flags for the sqrt-noise family (informational).
    std::array<bool, 4> scenario{false, false, false, false};
    /// Names the violated inequality when the verdict is Inconclusive.
    std::string reason;
};

/// Extinction verdict from the family-specific sufficient conditions,
/// including the Lyapunov limit and the reproduction ratio when defined.
AsymptoticReport extinction_report(const LimitData& limits, Family family);

/// Persistence levels from the asymptotic envelope zeros. x and y pick the
/// interaction corrections: u_I = N (beta1+ - x), v_I = N (beta1- + y);
/// admissible inputs satisfy -beta1- <= y <= x <= beta1+.
AsymptoticReport persistence_levels(const LimitData& limits, Family family, double x, double y);

/// Default choice x = beta1+, y = -beta1- (no interaction information).
AsymptoticReport persistence_default(const LimitData& limits, Family family);

/// Uses the supplied mean limit: x = y = mean_limit / N.
AsymptoticReport persistence_with_mean_limit(const LimitData& limits, Family family);

/// Symbolic check of the noise integrability underpinning rate-rho
/// extinction, for declared-bounded amplitudes: a vanishing diffusion is
/// integrable at every rate, a bounded one exactly when rho > 1/2.
bool noise_integrable_at_rate(const GeneralModel& model, double rho);

} // namespace mvsis

#endif
