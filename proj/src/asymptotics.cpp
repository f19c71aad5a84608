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
#include "mvsis/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvsis {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

} // namespace

MaxResult max_quadratic(double a, double b, double c, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("max_quadratic: y must be >= 0");
    if (y == 0.0) return {a, 0.0};
    if (c < 0.0) {
        if (b < -2.0 * c * y) {
            if (b <= 0.0) return {a, 0.0};
            return {a - b * b / (4.0 * c), -b / (2.0 * c)};
        }
        return {a + b * y + c * y * y, y};
    }
    const double slope = b + c * y;
    if (slope > 0.0) return {a + slope * y, y};
    return {a, 0.0};
}

MaxResult max_power32(double a, double b, double d, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("max_power32: y must be >= 0");
    if (y == 0.0) return {a, 0.0};
    if (d < 0.0 && b < 0.0) {
        const double ratio = b / d;
        if (y > (4.0 / 9.0) * ratio * ratio)
            return {a + b * y - (4.0 / 27.0) * b * b * b / (d * d),
                    y - (4.0 / 9.0) * ratio * ratio};
    }
    const double sq = d * std::sqrt(y);
    if (b >= sq) return {a + b * y, y};
    return {a + sq * y, 0.0};
}

MaxResult max_quartic_power(double a, double b, double c, double d, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("max_quartic_power: y must be >= 0");
    if (c == 0.0) return max_power32(a, b, d, y);
    if (c > 0.0) {
        if (d == 0.0) return max_quadratic(a, b, c, y);
        throw std::invalid_argument("max_quartic_power: requires c < 0 (or d = 0)");
    }
    if (d == 0.0) return max_quadratic(a, b, c, y);
    if (y == 0.0) return {a, 0.0};

    const double p0 = b + 2.0 * c * y;
    const double e = 2.25 * d * d + p0 * 8.0 * c;
    if ((p0 < 0.0 || (p0 >= 0.0 && d > 0.0)) && e > 0.0) {
        const double z_star = -(1.5 * d + std::sqrt(e)) / (4.0 * c);
        if (z_star < std::sqrt(y)) {
            const double pen = c * z_star + 0.5 * d;
            const double boundary = a + b * y + c * y * y;
            if (pen < 0.0)
                return {boundary - z_star * z_star * z_star * pen, y - z_star * z_star};
            return {boundary, y};
        }
    }
    const double left = d * std::sqrt(y);
    const double right = b + c * y;
    if (right >= left) return {a + right * y, y};
    return {a + left * y, 0.0};
}

double zero_of_f(double a, double b, double c, double d, double y, ZeroSelect select) {
    if (!(y > 0.0)) throw std::invalid_argument("zero_of_f: y must be positive");
    const auto f = [&](double x) {
        const double rest = y - x;
        return a + b * x + c * x * x + (d != 0.0 ? d * rest * std::sqrt(std::max(rest, 0.0)) : 0.0);
    };
    if (!(f(0.0) > 0.0)) throw std::domain_error("zero_of_f: requires f(0) > 0");
    const double fy = a + b * y + c * y * y;

    if (d == 0.0) {
        const double scale = std::max({std::abs(a), std::abs(b), 1.0});
        if (std::abs(c) < 1e-14 * scale) {
            if (b == 0.0) throw std::domain_error("zero_of_f: constant positive, no zero");
            const double x0 = -a / b;
            if (!(x0 > 0.0 && x0 <= y))
                throw std::domain_error("zero_of_f: linear zero outside (0, y]");
            return x0;
        }
        if (c < 0.0) {
            if (!(fy <= 0.0)) throw std::domain_error("zero_of_f: requires f(y) <= 0");
        } else {
            if (!(fy <= 0.0)) throw std::domain_error("zero_of_f: requires f(y) < 0");
            if (fy == 0.0 && select == ZeroSelect::Largest) return y;
        }
        const double disc = b * b - 4.0 * a * c;
        if (!(disc >= 0.0)) throw std::domain_error("zero_of_f: no real zero");
        const double sqrt_disc = std::sqrt(disc);
        // Conjugate form dodges the cancellation in (-b - sqrt(disc)) / (2c).
        const double q = -(b + (b >= 0.0 ? sqrt_disc : -sqrt_disc)) / 2.0;
        return b >= 0.0 ? q / c : a / q;
    }

    if (!(c <= 0.0)) throw std::domain_error("zero_of_f: d != 0 requires c <= 0");
    if (!(fy < 0.0)) throw std::domain_error("zero_of_f: requires f(y) < 0");
    double lo = 0.0, hi = y;
    const double tol = 1e-12 * std::max(1.0, y);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double h_general(const GeneralModel& model, double t, double x, double y,
                 const MeasureStats& stats) {
    if (!(x > 0.0) || !(x <= y))
        throw std::invalid_argument("h_general: requires 0 < x <= y");
    std::vector<double> coeffs(static_cast<std::size_t>(model.degree()) + 1);
    model.drift_coefficients_at(t, y, stats, coeffs);
    double drift_part = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) drift_part = drift_part * x + coeffs[i];
    drift_part /= x;
    std::vector<double> rows(static_cast<std::size_t>(model.noise_dim()));
    model.noise().eval_rows(t, x, y - x, rows);
    double sq = 0.0;
    for (double r : rows) sq += r * r;
    return drift_part - sq / (2.0 * x * x);
}

HEval h_eval(const GeneralModel& model, double t, double x, double y,
             const MeasureStats& stats) {
    if (!model.representative()) {
        HEval out;
        out.value = h_general(model, t, x, y, stats);
        return out;
    }
    const auto& rep = *model.representative();
    const bool half = rep.eta0 == 0.5;
    const double g11 = rep.g11(t);
    const double g12 = rep.g12(t);
    const double g21 = rep.g21(t);
    const double lump = half ? 0.5 * (g12 * g12 + g21 * g21) : 0.0;
    const double g1 = g11 + (half ? 0.0 : g12);
    const double gsq = g1 * g1 + (half ? 0.0 : g21 * g21);

    std::vector<double> coeffs(static_cast<std::size_t>(model.degree()) + 1);
    model.drift_coefficients_at(t, y, stats, coeffs);

    HEval out;
    out.b0 = coeffs[0];
    out.parts = std::array<double, 3>{
        coeffs[1] - lump * y - 0.5 * gsq * y * y,
        coeffs[2] + lump + gsq * y,
        coeffs[3] - 0.5 * gsq,
    };
    out.power_coeff = half ? -g11 * g12 : 0.0;

    const auto& h = *out.parts;
    if (x == 0.0) {
        if (rep.beta0(t) != 0.0)
            throw std::domain_error("h_eval: x = 0 requires beta0 = 0");
        out.value = h[0] + out.power_coeff * y * std::sqrt(y);
        return out;
    }
    if (!(x > 0.0) || !(x <= y)) throw std::invalid_argument("h_eval: requires 0 <= x <= y");
    if (x == y) {
        // the x = y cancellation is an identity of the family
        out.value = -(rep.mu(t) + rep.gamma(t));
        return out;
    }
    const double rest = y - x;
    out.value = out.b0 / x + h[0] + h[1] * x + h[2] * x * x +
                out.power_coeff * rest * std::sqrt(std::max(rest, 0.0));
    return out;
}

namespace {

double constant_or_throw(const TimeFunction& f, const char* name) {
    if (!f.is_constant())
        throw std::invalid_argument(std::string("auto limits: ") + name +
                                    " is not constant; supply LimitData explicitly");
    return *f.constant_value();
}

struct EnvelopeConstants {
    double u1 = 0.0, v1 = 0.0, v2 = 0.0, v3 = 0.0, d_inf = 0.0, gsq = 0.0;
};

EnvelopeConstants envelope_constants(const LimitData& lim) {
    EnvelopeConstants ec;
    const bool half = lim.eta0 == 0.5;
    const double lump = half ? 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf)
                             : 0.0;
    const double g1 = lim.g11_inf + (half ? 0.0 : lim.g12_inf);
    ec.gsq = g1 * g1 + (half ? 0.0 : lim.g21_inf * lim.g21_inf);
    ec.u1 = lim.beta_inf + pos(lim.beta1_inf) - lump;
    ec.v1 = lim.beta_inf - neg(lim.beta1_inf) - lump;
    ec.v2 = lim.c12_inf - 0.5 * ec.gsq;
    ec.v3 = lim.c21_inf + ec.gsq;
    ec.d_inf = half ? lim.g11_inf * lim.g12_inf : 0.0;
    return ec;
}

double h_inf_limit(const LimitData& lim) {
    const EnvelopeConstants ec = envelope_constants(lim);
    const double n = lim.n_inf;
    // h at x -> 0 under the point-mass limit law.
    const bool half = lim.eta0 == 0.5;
    const double lump = half ? 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf)
                             : 0.0;
    return -lim.mu_plus_gamma_inf + lim.beta_inf * n + lim.c12_inf * n * n - lump * n -
           0.5 * ec.gsq * n * n - ec.d_inf * n * std::sqrt(n);
}

std::optional<double> reproduction_ratio(const LimitData& lim) {
    if (!(lim.mu_plus_gamma_inf > 0.0)) return std::nullopt;
    const double h0 = h_inf_limit(lim) + lim.mu_plus_gamma_inf;
    return (h0 + pos(lim.beta1_inf) * lim.n_inf) / lim.mu_plus_gamma_inf;
}

std::array<bool, 4> sqrt_family_scenarios(const LimitData& lim) {
    const double n = lim.n_inf;
    const double sn = std::sqrt(n);
    const double halfsq = 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf);
    const double base = lim.beta_inf + pos(lim.beta1_inf) +
                        (2.0 * lim.c12_inf + lim.c21_inf) * n + lim.c22_inf * n * n;
    const double gg = lim.g11_inf * lim.g12_inf;
    std::array<bool, 4> s{};
    s[0] = halfsq >= base && gg >= 0.0;
    s[1] = -1.5 * gg >= 4.0 *
               (lim.c12_inf + lim.c21_inf + lim.c22_inf * n + 0.5 * lim.g11_inf * lim.g11_inf) *
               sn;
    s[2] = halfsq <= lim.beta_inf - neg(lim.beta1_inf) -
               (1.5 * gg + (lim.c21_inf + lim.g11_inf * lim.g11_inf) * sn +
                lim.c22_inf * n * sn) * sn;
    const double denom =
        0.5 * lim.g11_inf * lim.g11_inf + lim.c12_inf + lim.c21_inf + lim.c22_inf * n;
    s[3] = lim.g11_inf > 0.0 && denom > 0.0 &&
           halfsq >= base + 0.5 * 0.5625 * gg * gg / denom;
    return s;
}

} // namespace

LimitData simulated_limits(const SimulatedModelParams& p) {
    LimitData lim;
    lim.n_inf = p.N;
    lim.mu_plus_gamma_inf = p.mu + p.gamma;
    lim.beta_inf = p.beta;
    lim.beta1_inf = p.alpha * p.beta;
    lim.g11_inf = p.sigma;
    lim.eta0 = 1.0;
    return lim;
}

LimitData wang_limits(const WangParams& p) {
    LimitData lim;
    lim.n_inf = constant_or_throw(p.N.size, "N");
    lim.mu_plus_gamma_inf = constant_or_throw(p.mu, "mu") + constant_or_throw(p.gamma, "gamma");
    lim.beta_inf = p.beta_eq;
    lim.beta1_inf = constant_or_throw(p.beta1, "beta1");
    lim.g11_inf = p.xi / std::sqrt(2.0 * p.theta);
    lim.eta0 = 1.0;
    return lim;
}

LimitData cai_limits(const CaiParams& p) {
    LimitData lim;
    lim.n_inf = constant_or_throw(p.N.size, "N");
    lim.mu_plus_gamma_inf = constant_or_throw(p.mu, "mu") + constant_or_throw(p.gamma, "gamma");
    lim.beta_inf = constant_or_throw(p.beta, "beta");
    lim.beta1_inf = constant_or_throw(p.beta1, "beta1");
    const double s1 = constant_or_throw(p.sigma1, "sigma1");
    const double s2 = constant_or_throw(p.sigma2, "sigma2");
    lim.g11_inf = constant_or_throw(p.a1, "a1") * s1;
    lim.g12_inf = -constant_or_throw(p.a2, "a2") * s2;
    lim.g21_inf = -constant_or_throw(p.a3, "a3") * s2;
    lim.eta0 = 0.5;
    return lim;
}

LimitData bernardi_limits(const BernardiParams& p) {
    LimitData lim;
    lim.n_inf = constant_or_throw(p.N.size, "N");
    lim.mu_plus_gamma_inf = constant_or_throw(p.mu, "mu") + constant_or_throw(p.gamma, "gamma");
    lim.beta_inf = constant_or_throw(p.beta, "beta");
    lim.beta1_inf = constant_or_throw(p.beta1, "beta1");
    const double s = constant_or_throw(p.sigma, "sigma");
    lim.g11_inf = s;
    lim.c12_inf = 0.5 * s * s;
    lim.c21_inf = -1.5 * s * s;
    lim.eta0 = 1.0;
    return lim;
}

LimitData auto_limits(const GeneralModel& model) {
    if (!model.representative())
        throw std::invalid_argument("auto_limits: representative structure required");
    const auto& rep = *model.representative();
    LimitData lim;
    lim.n_inf = constant_or_throw(rep.N.size, "N");
    lim.mu_plus_gamma_inf = constant_or_throw(rep.mu, "mu") + constant_or_throw(rep.gamma, "gamma");
    lim.beta_inf = constant_or_throw(rep.beta, "beta");
    lim.beta1_inf = constant_or_throw(rep.beta1, "beta1");
    lim.g11_inf = constant_or_throw(rep.g11, "g11");
    lim.g12_inf = constant_or_throw(rep.g12, "g12");
    lim.g21_inf = constant_or_throw(rep.g21, "g21");
    lim.c12_inf = constant_or_throw(rep.c12, "c12");
    lim.c21_inf = constant_or_throw(rep.c21, "c21");
    lim.c22_inf = constant_or_throw(rep.c22, "c22");
    lim.eta0 = rep.eta0;
    return lim;
}

AsymptoticReport extinction_report(const LimitData& lim, Family family) {
    AsymptoticReport report;
    report.reproduction_ratio = reproduction_ratio(lim);
    const double n = lim.n_inf;
    const double mg = lim.mu_plus_gamma_inf;

    switch (family) {
    case Family::Simulated:
    case Family::Cai: {
        if (!(mg > 0.0))
            throw std::invalid_argument("extinction_report: this family requires mu + gamma > 0");
        report.scenario = sqrt_family_scenarios(lim);
        const bool half = lim.eta0 == 0.5;
        const double lump =
            half ? 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf) : 0.0;
        const double u1 = lim.beta_inf + pos(lim.beta1_inf) - lump;
        const double u2 = lim.g11_inf * lim.g12_inf;
        const double u3 = lim.c12_inf - 0.5 * lim.g11_inf * lim.g11_inf;
        const double u = -mg + pos(u1 * n - u2 * n * std::sqrt(n) + u3 * n * n);
        report.u = u;
        if (u < 0.0) {
            report.verdict = AsymptoticReport::Verdict::Extinct;
            report.rate = 1.0;
            report.h_inf = h_inf_limit(lim);
        } else {
            report.reason = "u >= 0: drift envelope does not fall below mu + gamma";
        }
        return report;
    }
    case Family::Wang: {
        const EnvelopeConstants ec = envelope_constants(lim);
        const bool half = lim.eta0 == 0.5;
        const double lump =
            half ? 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf) : 0.0;
        const double u1 = ec.u1;
        const double u2 = neg(lim.beta1_inf) - lim.beta_inf + lump;
        const double u3 = ec.gsq;
        const double u4 = lim.c12_inf + lim.c21_inf + lim.c22_inf * n + 0.5 * u3;
        const double threshold = (2.0 * lim.c12_inf + lim.c21_inf) * n + lim.c22_inf * n * n;
        double u;
        if (u2 >= threshold) {
            u = -mg;
        } else if (u4 > 0.0) {
            const double peak = pos(u2 + (lim.c21_inf + u3) * n + lim.c22_inf * n * n);
            u = -(mg + lim.u_interaction) + u1 * n + (lim.c12_inf - 0.5 * u3) * n * n +
                0.25 * peak * peak / u4;
        } else {
            report.reason = "quadratic-penalty branch needs c12 + c21 + c22 N + u3/2 > 0";
            return report;
        }
        report.u = u;
        if (u < 0.0) {
            report.verdict = AsymptoticReport::Verdict::Extinct;
            report.rate = 1.0;
            report.h_inf = h_inf_limit(lim);
        } else {
            report.reason = "u >= 0";
        }
        return report;
    }
    case Family::Bernardi: {
        const bool half = lim.eta0 == 0.5;
        const double lump =
            half ? 0.5 * (lim.g12_inf * lim.g12_inf + lim.g21_inf * lim.g21_inf) : 0.0;
        const double g1 = lim.g11_inf + (half ? 0.0 : lim.g12_inf);
        const double gsq = g1 * g1 + (half ? 0.0 : lim.g21_inf * lim.g21_inf);
        const double u1 = lim.beta_inf + pos(lim.beta1_inf) - lump;
        const double u2 = lim.c12_inf - 0.5 * gsq;
        const double u = pos(u1 + u2 * n) * n - (mg + lim.u_interaction);
        report.u = u;
        if (u < 0.0) {
            report.verdict = AsymptoticReport::Verdict::Extinct;
            report.rate = 1.0;
            report.h_inf = h_inf_limit(lim);
        } else {
            report.reason = "(u1 + u2 N)^+ N >= mu + gamma + u_I";
        }
        return report;
    }
    }
    throw std::logic_error("extinction_report: unknown family");
}

AsymptoticReport persistence_levels(const LimitData& lim, Family, double x, double y) {
    AsymptoticReport report;
    report.reproduction_ratio = reproduction_ratio(lim);
    const double n = lim.n_inf;
    if (!(n > 0.0)) {
        report.reason = "N_inf must be positive";
        return report;
    }
    const double b1p = pos(lim.beta1_inf);
    const double b1m = neg(lim.beta1_inf);
    const double tol = 1e-9 * (1.0 + std::abs(lim.beta1_inf));
    if (!(y >= -b1m - tol) || !(y <= x + tol) || !(x <= b1p + tol)) {
        report.reason = "interaction inputs must satisfy -beta1^- <= y <= x <= beta1^+";
        return report;
    }

    const EnvelopeConstants ec = envelope_constants(lim);
    const double u_i = n * (b1p - x);
    const double v_i = n * (b1m + y);
    const double a = -lim.mu_plus_gamma_inf + v_i + ec.v1 * n + ec.v2 * n * n;
    const double b = -ec.u1 + u_i / n + ec.v3 * n + lim.c22_inf * n * n;
    const double c = -ec.v2 - ec.v3 - lim.c22_inf * n;
    const double a_hat = a - u_i - v_i + (ec.u1 - ec.v1) * n;
    const double b_hat = b + ec.u1 - ec.v1 - (u_i + v_i) / n;

    if (!(a - ec.d_inf * n * std::sqrt(n) > 0.0)) {
        report.reason = "requires a_inf > d_inf N^{3/2}";
        return report;
    }
    try {
        report.level_x0 = zero_of_f(a, b, c, -ec.d_inf, n, ZeroSelect::Smallest);
    } catch (const std::domain_error& err) {
        report.reason = err.what();
        return report;
    }

    const double g_at_n = a_hat + b_hat * n + c * n * n;
    if (a_hat - ec.d_inf * n * std::sqrt(n) >= 0.0 && g_at_n < 0.0) {
        try {
            report.level_y0 = zero_of_f(a_hat, b_hat, c, -ec.d_inf, n, ZeroSelect::Largest);
        } catch (const std::domain_error&) {
            // upper level unavailable; the lower one stands
        }
    }

    if (x == y && lim.mu_plus_gamma_inf > 0.0)
        report.verdict = AsymptoticReport::Verdict::PersistAround;
    else
        report.verdict = AsymptoticReport::Verdict::PersistAbove;
    return report;
}

AsymptoticReport persistence_default(const LimitData& lim, Family family) {
    return persistence_levels(lim, family, pos(lim.beta1_inf), -neg(lim.beta1_inf));
}

bool noise_integrable_at_rate(const GeneralModel& model, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("noise_integrable_at_rate: rho must be > 0");
    const auto& noise = model.noise();
    bool active = false;
    for (int i = 0; i < noise.rows(); ++i)
        for (int j = 0; j < noise.terms(); ++j) active = active || noise.term_active(i, j);
    return !active || rho > 0.5;
}

AsymptoticReport persistence_with_mean_limit(const LimitData& lim, Family family) {
    if (!lim.mean_limit)
        throw std::invalid_argument("persistence_with_mean_limit: mean_limit not set");
    const double ratio = *lim.mean_limit / lim.n_inf;
    const double clamped =
        std::min(std::max(ratio, -neg(lim.beta1_inf)), pos(lim.beta1_inf));
    return persistence_levels(lim, family, clamped, clamped);
}

} // namespace mvsis
