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
#ifndef MVSIS_BOUNDS_HPP
#define MVSIS_BOUNDS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "mvsis/engine.hpp"
#include "mvsis/model.hpp"

namespace mvsis {

/// Regularity envelopes of a representative-family model. The signed hats
/// bound the drift coefficients from above, the absolute hats bound their
/// magnitude, and the diffusion envelopes give linear growth and Lipschitz
/// moduli. All time arguments are composed with N(s) unless a function also
/// takes an explicit population argument.
struct HatCoeffs {
    PopulationFunction population;

    std::function<double(double)> b0, b1, b2, b3;  // one-sided coefficient hats
    std::function<double(double)> b4, b5;          // sharpened contraction / growth hats
    std::function<double(double)> bk1, bk2;        // max-envelope forms of the same
    std::function<double(double)> lam_k1;          // envelope of the measure sensitivity

    std::array<std::function<double(double, double)>, 4> babs;  // |b_i| <= babs_i(s, y)

    bool lipschitz = false;
    std::function<double(double, double)> lam;  // λ(s, y); set only in the Lipschitz regime

    std::array<double, 4> bbar{};           // time/population modulus constants
    std::function<double(double)> lambda0;  // time modulus of the diffusion, per population level

    double bk3(double s, double y) const;  // envelope of |sum b_i x^{i-1}|
    double bk4(double s, double y) const;  // envelope of |sum i b_i x^{i-1}|
    double bbar_k1(double y) const;

    double lam_at(double s) const { return lam(s, population.size(s)); }
};

/// Hat values at one time point.
struct HatValues {
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
    double b4 = 0, b5 = 0;
    double bk1 = 0, bk2 = 0;
    double bk3 = 0, bk4 = 0;
    double lam_k1 = 0;
    std::optional<double> l;    // linear-growth coefficient of the diffusion
    std::optional<double> lam;  // Lipschitz coefficient; both need eta0 >= 1
};

/// Analytic envelopes for representative-family models.
HatCoeffs hat_functions(const GeneralModel& model);
HatValues hat_coefficients(const GeneralModel& model, double t);

/// exp(int_0^t bk2) E[xi0] + int_0^t exp(int_s^t bk2) b0(s) ds.
double first_moment_bound(const HatCoeffs& hc, double t, double e_xi0);

/// Same shape with rate (p-1) b0 + p (bk2 + c_p l^2), c_p = (p-1)/2; p >= 2.
double pth_moment_bound(const HatCoeffs& hc, double p, double t, double e_xi0_p);

/// Contraction bound between two solutions started at distance delta0:
/// p = 1 uses b4 + lam_k1, p >= 2 uses p (b4 + lam_k1 + c_p lam^2).
double comparison_bound(const HatCoeffs& hc, double p, double t, double e_delta0_p);

/// Scheme moment bound on [t_j, t_{j+1}] with grid-max rate constants.
double em_moment_bound(const HatCoeffs& hc, const Partition& grid, double p, std::int64_t j,
                       double t, double e_xi0_p);

/// Step-increment coefficient m_{p,j}: the scheme increment over
/// [t_j, t_j + h] has p-th norm at most m_{p,j} sqrt(h).
double em_increment_bound(const HatCoeffs& hc, const Partition& grid, double p, std::int64_t j,
                          int noise_dim);

/// ( E[(Z_1^2 + ... + Z_d^2)^{p/2}] )^{1/p} for standard normals.
double chi_moment_factor(int d, double p);

struct StrongErrorParams {
    double p = 2.0;
    double q = 5.0;  // moment order controlling the empirical-measure term; q > 2p
    std::int64_t particles = 1;
    double c_pq = 0.0;  // empirical-measure constant, supplied by the caller
    int noise_dim = 1;
    /// Optional Hölder data of N for the mesh-rate form.
    std::optional<double> holder_alpha;
    std::optional<double> holder_const;
};

struct StrongErrorResult {
    /// Bound on max_l E[|interpolated - exact|^p] at time t.
    double value = 0.0;
    /// Mesh-rate constant and the resulting c |mesh|^alpha form (p-th root
    /// scale), present when Hölder data was supplied.
    std::optional<double> rate_constant;
    std::optional<double> rate_form;
};

StrongErrorResult strong_error_bound(const HatCoeffs& hc, const Partition& grid,
                                     const StrongErrorParams& params, double t);

} // namespace mvsis

#endif
