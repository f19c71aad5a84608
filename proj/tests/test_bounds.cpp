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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mvsis/bounds.hpp"
#include "mvsis/measures.hpp"
#include "mvsis/quadrature.hpp"

using namespace mvsis;

namespace {

SimulatedModelParams parameters_rapid_extinction(double alpha) {
    return SimulatedModelParams{100.0, 0.5, 25.0, 20.0, 0.08, alpha, 50.0};
}

HatCoeffs constant_hats(double bk2_const, double b0_const, double l_const) {
    // synthetic envelope set with constant coefficients
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    HatCoeffs hc = hat_functions(model);
    hc.bk2 = [bk2_const](double) { return bk2_const; };
    hc.b0 = [b0_const](double) { return b0_const; };
    hc.b4 = [bk2_const](double) { return bk2_const; };
    hc.lam = [l_const](double, double) { return l_const; };
    hc.lipschitz = true;
    return hc;
}

} // namespace

TEST_CASE("adaptive quadrature") {
    CHECK(integrate([](double) { return 2.0; }, 0.0, 3.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(integrate([](double s) { return std::sin(s); }, 0.0, 3.141592653589793) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate([](double s) { return std::exp(-s); }, 0.0, 20.0) ==
          doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-9));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("chi moment factor") {
    CHECK(chi_moment_factor(1, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(chi_moment_factor(2, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int d : {1, 2, 3}) {
        for (double p : {2.0, 4.0}) {
            double sum = 0.0;
            const int n = 2'000'000;
            for (int i = 0; i < n; ++i) {
                double q = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double z = normal(rng);
                    q += z * z;
                }
                sum += std::pow(q, 0.5 * p);
            }
            const double mc = std::pow(sum / n, 1.0 / p);
            CHECK(chi_moment_factor(d, p) == doctest::Approx(mc).epsilon(0.01));
        }
    }
}

TEST_CASE("first moment bound: trivial and closed-form cases") {
    auto hc = constant_hats(0.0, 0.0, 0.0);
    CHECK(first_moment_bound(hc, 2.0, 50.0) == doctest::Approx(50.0).epsilon(1e-10));

    const double c = 1.3, a = 0.7, t = 2.0;
    hc = constant_hats(c, a, 0.0);
    const double closed = std::exp(c * t) * 50.0 + a * (std::exp(c * t) - 1.0) / c;
    CHECK(first_moment_bound(hc, t, 50.0) == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("first moment bound at the experiment parameters") {
    const auto hc = hat_functions(build_simulated(parameters_rapid_extinction(0.0)));
    CHECK(first_moment_bound(hc, 1.0, 50.0) ==
          doctest::Approx(50.0 * std::exp(5.0)).epsilon(1e-8));
}

TEST_CASE("pth moment bound rate constant") {
    const auto hc = hat_functions(build_simulated(parameters_rapid_extinction(0.0)));
    // (p-1) b0 + p (bk2 + c_p l^2) = 2 (5 + 0.5 * 64) = 74 at p = 2
    CHECK(pth_moment_bound(hc, 2.0, 0.1, 2500.0) ==
          doctest::Approx(std::exp(74.0 * 0.1) * 2500.0).epsilon(1e-8));
    CHECK_THROWS_AS(pth_moment_bound(hc, 1.5, 0.1, 1.0), std::invalid_argument);

    // zero diffusion reduces the rate to 2 bk2 + b0
    auto zero_l = constant_hats(5.0, 0.0, 0.0);
    CHECK(pth_moment_bound(zero_l, 2.0, 0.1, 2500.0) ==
          doctest::Approx(std::exp(10.0 * 0.1) * 2500.0).epsilon(1e-8));
}

TEST_CASE("comparison bound") {
    const auto hc = hat_functions(build_simulated(parameters_rapid_extinction(0.0)));
    CHECK(comparison_bound(hc, 1.0, 5.0, 0.0) == 0.0);
    // b4 + lam_k1 = 5 at these parameters
    CHECK(comparison_bound(hc, 1.0, 0.1, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-8));
    // p = 2: rate 2 (5 + 0 + 0.5 * 64) = 74
    CHECK(comparison_bound(hc, 2.0, 0.1, 1.0) == doctest::Approx(std::exp(7.4)).epsilon(1e-8));
    CHECK_THROWS_AS(comparison_bound(hc, 1.5, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("scheme moment bound") {
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    const auto hc = hat_functions(model);
    const auto grid = Partition::equidistant(0.1, 10);

    // constant coefficients: the grid max equals the constant
    const double k2 = (2.0 - 1.0) * hc.b0(0.0) +
                      2.0 * (hc.bk3(0.0, 100.0) + 0.5 * hc.lam(0.0, 100.0) * hc.lam(0.0, 100.0));
    const double t = 0.05;
    const double direct = em_moment_bound(hc, grid, 2.0, 4, t, 2500.0);
    CHECK(direct == doctest::Approx(std::exp(k2 * t) * 2500.0).epsilon(1e-12));

    // vanishing envelopes collapse the bound to the initial moment
    auto flat = constant_hats(0.0, 0.0, 0.0);
    for (auto& babs : flat.babs) babs = [](double, double) { return 0.0; };
    CHECK(em_moment_bound(flat, grid, 2.0, 4, t, 2500.0) ==
          doctest::Approx(2500.0).epsilon(1e-12));

    CHECK_THROWS_AS(em_moment_bound(hc, grid, 2.0, 42, t, 1.0), std::out_of_range);
    CHECK_THROWS_AS(em_moment_bound(hc, grid, 2.0, 4, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("increment coefficient") {
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    const auto hc = hat_functions(model);
    const auto grid = Partition::equidistant(0.05, 50);
    const double m = em_increment_bound(hc, grid, 2.0, 0, 1);
    const double expected =
        std::sqrt(0.05) * (0.0 + hc.bk3(0.0, 100.0) * 100.0) + 1.0 * 8.0 * 100.0;
    CHECK(m == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("monte carlo moments stay below the bounds") {
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    const auto hc = hat_functions(model);
    const double t = 0.05;
    const auto grid = Partition::equidistant(t, 50);
    const auto out = simulate_particles(model, grid, 4000, 123, constant_initial(50.0));

    const auto mc = [&](double p, double& sigma) {
        std::vector<double> powers(out.final_values.size());
        for (std::size_t i = 0; i < powers.size(); ++i)
            powers[i] = std::pow(std::abs(out.final_values[i]), p);
        const double mean = pairwise_sum(powers) / static_cast<double>(powers.size());
        double var = 0.0;
        for (double v : powers) var += (v - mean) * (v - mean);
        var /= static_cast<double>(powers.size() - 1);
        sigma = std::sqrt(var / static_cast<double>(powers.size()));
        return mean;
    };
    double s1 = 0.0, s2 = 0.0;
    CHECK(mc(1.0, s1) <= first_moment_bound(hc, t, 50.0) + 3.0 * s1);
    CHECK(mc(2.0, s2) <= pth_moment_bound(hc, 2.0, t, 2500.0) + 3.0 * s2);
    CHECK(mc(2.0, s2) <= em_moment_bound(hc, grid, 2.0, grid.steps() - 1, t, 2500.0) + 3.0 * s2);

    // step increments against m^2 h
    std::vector<double> gaps(out.paths.size());
    for (std::int64_t j = 0; j < grid.steps(); ++j) {
        for (std::size_t r = 0; r < out.paths.size(); ++r) {
            const double d = out.paths[r][static_cast<std::size_t>(j + 1)] -
                             out.paths[r][static_cast<std::size_t>(j)];
            gaps[r] = d * d;
        }
        const double mean = pairwise_sum(gaps) / static_cast<double>(gaps.size());
        const double m = em_increment_bound(hc, grid, 2.0, j, model.noise_dim());
        CHECK(mean <= m * m * grid.dt(j));
    }
}

TEST_CASE("coupled runs stay below the comparison bound") {
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    const auto hc = hat_functions(model);
    const double t = 0.1;
    const auto grid = Partition::equidistant(t, 100);
    SimOptions opts;
    opts.store_paths = 0;
    const auto a = simulate_particles(model, grid, 4000, 5, constant_initial(50.0), opts);
    const auto b = simulate_particles(model, grid, 4000, 5, constant_initial(51.0), opts);
    std::vector<double> gaps(a.final_values.size());
    for (std::size_t l = 0; l < gaps.size(); ++l)
        gaps[l] = std::abs(a.final_values[l] - b.final_values[l]);
    const double mean = pairwise_sum(gaps) / static_cast<double>(gaps.size());
    double var = 0.0;
    for (double v : gaps) var += (v - mean) * (v - mean);
    var /= static_cast<double>(gaps.size() - 1);
    const double sigma = std::sqrt(var / static_cast<double>(gaps.size()));
    CHECK(mean <= comparison_bound(hc, 1.0, t, 1.0) + 3.0 * sigma);
}

TEST_CASE("strong error bound: structure") {
    const auto model = build_simulated(parameters_rapid_extinction(0.0));
    auto hc = hat_functions(model);
    const auto grid = Partition::equidistant(0.1, 16);

    StrongErrorParams params;
    params.p = 2.0;
    params.q = 5.0;
    params.particles = 256;
    params.c_pq = 1.0;
    params.noise_dim = 1;

    const double value = strong_error_bound(hc, grid, params, 0.1).value;
    CHECK(value >= 0.0);
    CHECK(strong_error_bound(hc, grid, params, 0.05).value <= value);

    // no measure sensitivity: independent of the particle count
    CHECK(hc.lam_k1(0.0) == 0.0);
    StrongErrorParams more = params;
    more.particles = 4096;
    CHECK(strong_error_bound(hc, grid, more, 0.1).value ==
          doctest::Approx(value).epsilon(1e-12));

    // with measure sensitivity the bound decreases in M and increases in mesh
    const auto interacting = build_simulated(parameters_rapid_extinction(0.5));
    const auto hci = hat_functions(interacting);
    CHECK(hci.lam_k1(0.0) > 0.0);
    double previous = std::numeric_limits<double>::infinity();
    for (std::int64_t m : {64, 256, 1024, 4096}) {
        StrongErrorParams pm = params;
        pm.particles = m;
        const double v = strong_error_bound(hci, grid, pm, 0.1).value;
        CHECK(v < previous);
        previous = v;
    }
    double previous_mesh = 0.0;
    for (std::int64_t steps : {64, 32, 16, 8}) {
        const auto g = Partition::equidistant(0.1, steps);
        const double v = strong_error_bound(hci, g, params, 0.1).value;
        CHECK(v >= previous_mesh);
        previous_mesh = v;
    }

    CHECK_THROWS_AS(strong_error_bound(hc, grid, StrongErrorParams{2.0, 3.0, 16, 1.0, 1, {}, {}},
                                       0.1),
                    std::invalid_argument);
}

TEST_CASE("strong error bound: rate form for constant population") {
    const auto model = build_simulated(parameters_rapid_extinction(0.5));
    const auto hc = hat_functions(model);
    const auto grid = Partition::equidistant(0.1, 32);
    StrongErrorParams params;
    params.p = 2.0;
    params.q = 5.0;
    params.particles = 1024;
    params.c_pq = 2.0;
    params.noise_dim = 1;
    params.holder_alpha = 0.5;
    params.holder_const = 0.0;  // constant N contributes nothing
    const auto result = strong_error_bound(hc, grid, params, 0.1);
    REQUIRE(result.rate_form.has_value());
    CHECK(*result.rate_form > 0.0);
    CHECK(*result.rate_constant > 0.0);
    CHECK(*result.rate_form ==
          doctest::Approx(*result.rate_constant * std::sqrt(grid.mesh())).epsilon(1e-12));
}

TEST_CASE("bounds are nonnegative and nondecreasing in time") {
    const auto hc = hat_functions(build_simulated(parameters_rapid_extinction(0.3)));
    double previous_first = 0.0, previous_pth = 0.0, previous_cmp = 0.0;
    for (double t : {0.0, 0.02, 0.05, 0.1, 0.2}) {
        const double f = first_moment_bound(hc, t, 50.0);
        const double p2 = pth_moment_bound(hc, 2.0, t, 2500.0);
        const double cb = comparison_bound(hc, 1.0, t, 1.0);
        CHECK(f >= previous_first);
        CHECK(p2 >= previous_pth);
        CHECK(cb >= previous_cmp);
        CHECK(f >= 0.0);
        previous_first = f;
        previous_pth = p2;
        previous_cmp = cb;
    }
}

TEST_CASE("envelopes unavailable below the Lipschitz regime") {
    CaiParams cai;
    cai.a1 = 1.0;
    cai.a2 = 0.5;
    cai.a3 = 1.0;
    cai.sigma1 = 0.05;
    cai.sigma2 = 0.03;
    cai.beta = 0.5;
    cai.gamma = 25.0;
    cai.mu = 20.0;
    cai.N = PopulationFunction::constant(100.0);
    const auto model = build_cai(cai);
    const auto hc = hat_functions(model);
    CHECK_FALSE(hc.lipschitz);
    const auto values = hat_coefficients(model, 0.0);
    CHECK_FALSE(values.l.has_value());
    CHECK_FALSE(values.lam.has_value());
    CHECK_THROWS_AS(pth_moment_bound(hc, 2.0, 0.1, 1.0), std::invalid_argument);
}
