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
#include "mvsis/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mvsis/asymptotics.hpp"
#include "mvsis/quadrature.hpp"

namespace mvsis {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

constexpr double kQuadTol = 1e-10;

} // namespace

double HatCoeffs::bk3(double s, double y) const {
    double sum = 0.0, yp = 1.0;
    for (int i = 1; i < 4; ++i) {
        sum += babs[static_cast<std::size_t>(i)](s, y) * yp;
        yp *= y;
    }
    return sum;
}

double HatCoeffs::bk4(double s, double y) const {
    double sum = 0.0, yp = 1.0;
    for (int i = 1; i < 4; ++i) {
        sum += static_cast<double>(i) * babs[static_cast<std::size_t>(i)](s, y) * yp;
        yp *= y;
    }
    return sum;
}

double HatCoeffs::bbar_k1(double y) const {
    double sum = 0.0, yp = 1.0;
    for (int i = 0; i < 4; ++i) {
        sum += bbar[static_cast<std::size_t>(i)] * yp;
        yp *= y;
    }
    return sum;
}

HatCoeffs hat_functions(const GeneralModel& model) {
    if (!model.representative())
        throw std::invalid_argument("hat_functions: representative structure required");
    const RepresentativeParams rep = *model.representative();
    const PopulationFunction N = rep.N;

    HatCoeffs hc;
    hc.population = N;

    const auto hat1 = [rep, N](double s) {
        const double y = N.size(s);
        return -(rep.mu(s) + rep.gamma(s)) + pos(rep.beta1(s) - rep.beta0(s)) * y +
               rep.beta(s) * y + rep.c12(s) * y * y;
    };
    const auto hat2 = [rep, N](double s) {
        const double y = N.size(s);
        return neg(rep.beta1(s)) - rep.beta(s) + rep.c21(s) * y + rep.c22(s) * y * y;
    };
    const auto hat3 = [rep, N](double s) {
        const double y = N.size(s);
        return -rep.c12(s) - rep.c21(s) - rep.c22(s) * y;
    };

    hc.b0 = [rep, N](double s) {
        const double y = N.size(s);
        return rep.beta0(s) * y * y;
    };
    hc.b1 = hat1;
    hc.b2 = hat2;
    hc.b3 = hat3;

    hc.b4 = [rep, N, hat1](double s) {
        const double y = N.size(s);
        const double inner = pos(rep.beta1(s) - rep.beta0(s)) - neg(rep.beta0(s) + rep.beta1(s)) +
                             2.0 * rep.beta(s) + (3.0 * rep.c12(s) + rep.c21(s)) * y +
                             rep.c22(s) * y * y;
        return hat1(s) + neg(inner) * y;
    };
    hc.b5 = [rep, N, hat1](double s) {
        const double y = N.size(s);
        const double inner =
            pos(rep.beta1(s) - rep.beta0(s)) - neg(rep.beta0(s)) + rep.beta(s) + rep.c12(s) * y;
        return hat1(s) + neg(inner) * y;
    };

    hc.bk1 = [N, hat1, hat2, hat3](double s) {
        return max_quadratic(hat1(s), 2.0 * hat2(s), 3.0 * hat3(s), N.size(s)).value;
    };
    hc.bk2 = [N, hat1, hat2, hat3](double s) {
        return max_quadratic(hat1(s), hat2(s), hat3(s), N.size(s)).value;
    };

    hc.lam_k1 = [rep, N](double s) {
        return (std::abs(rep.beta0(s)) + std::abs(rep.beta1(s) - rep.beta0(s)) +
                std::abs(rep.beta1(s))) *
               N.size(s);
    };

    hc.babs[0] = [rep](double s, double y) { return rep.beta0(s) * y * y; };
    hc.babs[1] = [rep](double s, double y) {
        return rep.mu(s) + rep.gamma(s) + std::abs(rep.beta1(s) - rep.beta0(s)) * y +
               rep.beta(s) * y + std::abs(rep.c12(s)) * y * y;
    };
    hc.babs[2] = [rep](double s, double y) {
        return std::abs(rep.beta1(s)) + rep.beta(s) + std::abs(rep.c21(s)) * y +
               std::abs(rep.c22(s)) * y * y;
    };
    hc.babs[3] = [rep](double s, double y) {
        return std::abs(rep.c12(s)) + std::abs(rep.c21(s)) + std::abs(rep.c22(s)) * y;
    };

    hc.lipschitz = model.noise().lipschitz_exponents();
    if (hc.lipschitz) {
        const double eta0 = rep.eta0;
        hc.lam = [rep, eta0](double s, double y) {
            const double row1 = rep.g11(s) + rep.g12(s);
            const double row2 = rep.g21(s);
            return std::sqrt(row1 * row1 + row2 * row2) * power_term(y, eta0);
        };
    }

    // Population-sensitivity constants, derivable when the coefficients and
    // N are constant; callers may override for time-dependent models.
    if (N.size.is_constant()) {
        const double y = *N.size.constant_value();
        hc.bbar[0] = rep.beta0.bound() * y;
        hc.bbar[1] = rep.beta.bound() + 2.0 * rep.c12.bound() * y;
        hc.bbar[2] = rep.beta1.bound() / y + rep.c21.bound() + 2.0 * rep.c22.bound() * y;
        hc.bbar[3] = rep.c22.bound();
    }
    hc.lambda0 = [](double) { return 0.0; };
    return hc;
}

HatValues hat_coefficients(const GeneralModel& model, double t) {
    const HatCoeffs hc = hat_functions(model);
    HatValues v;
    v.b0 = hc.b0(t);
    v.b1 = hc.b1(t);
    v.b2 = hc.b2(t);
    v.b3 = hc.b3(t);
    v.b4 = hc.b4(t);
    v.b5 = hc.b5(t);
    v.bk1 = hc.bk1(t);
    v.bk2 = hc.bk2(t);
    const double n = hc.population.size(t);
    v.bk3 = hc.bk3(t, n);
    v.bk4 = hc.bk4(t, n);
    v.lam_k1 = hc.lam_k1(t);
    if (hc.lipschitz) {
        v.lam = hc.lam(t, n);
        v.l = v.lam;
    }
    return v;
}

namespace {

double exponential_bound(const std::function<double(double)>& rate,
                         const std::function<double(double)>& source, double t, double initial) {
    if (t == 0.0) return initial;
    if (!(t > 0.0)) throw std::invalid_argument("bound: t must be >= 0");
    const auto accumulated = [&](double lo, double hi) {
        return integrate(rate, lo, hi, kQuadTol);
    };
    const double total = accumulated(0.0, t);
    const double inhomogeneous = integrate(
        [&](double s) { return std::exp(accumulated(s, t)) * source(s); }, 0.0, t, kQuadTol);
    return std::exp(total) * initial + inhomogeneous;
}

void require_lipschitz(const HatCoeffs& hc, const char* op) {
    if (!hc.lipschitz || !hc.lam)
        throw std::invalid_argument(std::string(op) +
                                    ": diffusion Lipschitz envelope unavailable (eta0 < 1)");
}

} // namespace

double first_moment_bound(const HatCoeffs& hc, double t, double e_xi0) {
    return exponential_bound(hc.bk2, hc.b0, t, e_xi0);
}

double pth_moment_bound(const HatCoeffs& hc, double p, double t, double e_xi0_p) {
    if (!(p >= 2.0)) throw std::invalid_argument("pth_moment_bound: requires p >= 2");
    require_lipschitz(hc, "pth_moment_bound");
    const double cp = 0.5 * (p - 1.0);
    const auto rate = [&, p, cp](double s) {
        const double l = hc.lam_at(s);
        return (p - 1.0) * hc.b0(s) + p * (hc.bk2(s) + cp * l * l);
    };
    return exponential_bound(rate, hc.b0, t, e_xi0_p);
}

double comparison_bound(const HatCoeffs& hc, double p, double t, double e_delta0_p) {
    if (t < 0.0) throw std::invalid_argument("comparison_bound: t must be >= 0");
    if (p == 1.0) {
        const auto rate = [&](double s) { return hc.b4(s) + hc.lam_k1(s); };
        return std::exp(integrate(rate, 0.0, t, kQuadTol)) * e_delta0_p;
    }
    if (!(p >= 2.0)) throw std::invalid_argument("comparison_bound: requires p = 1 or p >= 2");
    require_lipschitz(hc, "comparison_bound");
    const double cp = 0.5 * (p - 1.0);
    const auto rate = [&, p, cp](double s) {
        const double l = hc.lam_at(s);
        return p * (hc.b4(s) + hc.lam_k1(s) + cp * l * l);
    };
    return std::exp(integrate(rate, 0.0, t, kQuadTol)) * e_delta0_p;
}

double em_moment_bound(const HatCoeffs& hc, const Partition& grid, double p, std::int64_t j,
                       double t, double e_xi0_p) {
    if (j < 0 || j >= grid.steps()) throw std::out_of_range("em_moment_bound: step index");
    if (!(t >= grid.node(j) && t <= grid.node(j + 1)))
        throw std::invalid_argument("em_moment_bound: t outside [t_j, t_{j+1}]");
    require_lipschitz(hc, "em_moment_bound");
    const double cp = 0.5 * (p - 1.0);
    double k_rate = 0.0, l_rate = 0.0, b0_max = 0.0;
    for (std::int64_t i = 0; i <= j; ++i) {
        const double ti = grid.node(i);
        const double n = hc.population.size(ti);
        const double b0 = hc.b0(ti);
        const double bk3 = hc.bk3(ti, n);
        const double l = hc.lam(ti, n);
        k_rate = std::max(k_rate, (p - 1.0) * b0 + p * (bk3 + cp * l * l));
        l_rate = std::max(l_rate, 2.0 * (p - 1.0) * (b0 + cp * l * l) + (2.0 * p - 1.0) * bk3);
        b0_max = std::max(b0_max, b0);
    }
    return std::exp(k_rate * t) * e_xi0_p + std::exp(l_rate * t) * t * b0_max;
}

double em_increment_bound(const HatCoeffs& hc, const Partition& grid, double p, std::int64_t j,
                          int noise_dim) {
    if (j < 0 || j >= grid.steps()) throw std::out_of_range("em_increment_bound: step index");
    require_lipschitz(hc, "em_increment_bound");
    const double tj = grid.node(j);
    const double n = hc.population.size(tj);
    return std::sqrt(grid.horizon()) * (hc.b0(tj) + hc.bk3(tj, n) * n) +
           chi_moment_factor(noise_dim, p) * hc.lam(tj, n) * n;
}

double chi_moment_factor(int d, double p) {
    if (d < 1 || !(p >= 1.0)) throw std::invalid_argument("chi_moment_factor: d >= 1, p >= 1");
    const double log_moment = 0.5 * p * std::log(2.0) +
                              std::lgamma(0.5 * (d + p)) - std::lgamma(0.5 * d);
    return std::exp(log_moment / p);
}

StrongErrorResult strong_error_bound(const HatCoeffs& hc, const Partition& grid,
                                     const StrongErrorParams& params, double t) {
    const double p = params.p;
    if (!(p >= 2.0)) throw std::invalid_argument("strong_error_bound: requires p >= 2");
    if (!(params.q > 2.0 * p))
        throw std::invalid_argument("strong_error_bound: requires q > 2p");
    if (!(params.c_pq >= 0.0))
        throw std::invalid_argument("strong_error_bound: c_pq must be supplied (>= 0)");
    if (params.particles < 1)
        throw std::invalid_argument("strong_error_bound: particle count must be >= 1");
    require_lipschitz(hc, "strong_error_bound");
    if (!(t >= 0.0 && t <= grid.horizon()))
        throw std::invalid_argument("strong_error_bound: t outside [0, T]");

    const double cp = 0.5 * (p - 1.0);
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(params.particles));
    const auto n_of = [&](double s) { return hc.population.size(s); };

    // All per-step envelopes are nondecreasing in the node population level,
    // so the running max over previous nodes is realised at the largest one.
    const auto lambda_rate = [&](double s, double n_hist) {
        const double n = n_of(s);
        const double nmax = std::max(n, n_hist);
        const double lam = hc.lam(s, nmax);
        const double lam0 = hc.lambda0(n_hist);
        return (p - 1.0) * (2.0 * hc.bbar_k1(n_hist) + hc.bk4(s, nmax)) +
               (2.0 * p - 1.0) * hc.bk4(s, n) + 3.0 * (p - 2.0) * cp * lam0 * lam0 +
               13.0 * (p - 1.0) * cp * lam * lam;
    };

    double exponent = 0.0;
    double integral = 0.0;
    double c_alpha0 = 0.0;
    double n_node_max = 0.0;

    for (std::int64_t i = 0; i < grid.steps(); ++i) {
        const double ti = grid.node(i);
        const double n_i = n_of(ti);
        n_node_max = std::max(n_node_max, n_i);
        const double n_hist = n_node_max;

        const double m_i = em_increment_bound(hc, grid, p, i, params.noise_dim);
        const double m_pow = std::pow(m_i, p);
        const double lam0 = hc.lambda0(n_hist);
        const double delta1 = hc.bbar_k1(n_hist) + 6.0 * cp * lam0 * lam0;

        const auto delta23 = [&](double s, double& delta2, double& delta3) {
            const double n = n_of(s);
            const double nmax = std::max(n, n_i);
            const double lam = hc.lam(s, nmax);
            delta2 = hc.bbar_k1(n_i) + hc.bk4(s, nmax) + 1.5 * cp * lam * lam;
            delta3 = hc.bk4(s, n) + 12.0 * cp * lam * lam;
        };

        if (ti < t) {
            const double hi = std::min(grid.node(i + 1), t);
            const auto integrand = [&](double s) {
                double delta2 = 0.0, delta3 = 0.0;
                delta23(s, delta2, delta3);
                const double dn = std::abs(n_of(s) - n_i);
                const double step_part = (delta1 + delta3 * m_pow) * std::pow(s - ti, 0.5 * p) +
                                         delta2 * std::pow(dn, p);
                return step_part +
                       hc.lam_k1(s) * (m_pow * std::pow(s - ti, 0.5 * p) +
                                       2.0 * params.c_pq * std::pow(n_of(s), p) * inv_sqrt_m);
            };
            integral += integrate(integrand, ti, hi, kQuadTol);
            exponent += integrate(
                [&](double s) { return lambda_rate(s, n_hist) + (3.0 * p - 2.0) * hc.lam_k1(s); },
                ti, hi, kQuadTol);
        }

        if (params.holder_alpha) {
            const double alpha = *params.holder_alpha;
            const double c_alpha = params.holder_const.value_or(0.0);
            for (double s : {ti, 0.5 * (ti + grid.node(i + 1)), grid.node(i + 1)}) {
                double delta2 = 0.0, delta3 = 0.0;
                delta23(s, delta2, delta3);
                const double head = (delta1 + (delta3 + hc.lam_k1(s)) * m_pow) *
                                    std::pow(grid.horizon(), (0.5 - alpha) * p);
                c_alpha0 = std::max(c_alpha0, head + delta2 * std::pow(c_alpha, p));
            }
        }
    }

    StrongErrorResult result;
    result.value = std::exp(exponent) * integral;

    if (params.holder_alpha) {
        const double alpha = *params.holder_alpha;
        const double mesh = grid.mesh();
        // Full-horizon exponent for the uniform-in-time rate constant.
        double full_exponent = exponent;
        for (std::int64_t i = 0; i < grid.steps(); ++i) {
            const double lo = std::max(grid.node(i), t);
            const double hi = grid.node(i + 1);
            if (lo >= hi) continue;
            full_exponent += integrate(
                [&](double s) {
                    return lambda_rate(s, n_node_max) + (3.0 * p - 2.0) * hc.lam_k1(s);
                },
                lo, hi, kQuadTol);
        }
        const double c_hat_p = std::exp(full_exponent / p);
        const double c_p0 = integrate(
            [&](double s) { return hc.lam_k1(s) * std::pow(n_of(s), p); }, 0.0, grid.horizon(),
            kQuadTol);
        const double c0 =
            static_cast<double>(params.particles) * std::pow(mesh, 2.0 * alpha * p);
        const double tail = c0 > 0.0 && params.c_pq > 0.0
                                ? 2.0 * params.c_pq * c_p0 / std::sqrt(c0)
                                : 0.0;
        const double rate_const = c_hat_p * std::pow(c_alpha0 * grid.horizon() + tail, 1.0 / p);
        result.rate_constant = rate_const;
        result.rate_form = rate_const * std::pow(mesh, alpha);
    }
    return result;
}

} // namespace mvsis
