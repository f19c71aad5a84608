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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mvsis/measures.hpp"

using namespace mvsis;

namespace {

EmpiricalMeasure random_measure(std::mt19937_64& rng, std::size_t n, double scale = 10.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> values(n);
    for (double& v : values) v = dist(rng);
    return EmpiricalMeasure::from_samples(values);
}

} // namespace

TEST_CASE("from_samples sorts and validates") {
    const auto mu = EmpiricalMeasure::from_samples(std::vector<double>{3.0, 1.0, 2.0});
    CHECK(mu.samples() == std::vector<double>{1.0, 2.0, 3.0});

    const auto single = EmpiricalMeasure::from_samples(std::vector<double>{5.0});
    CHECK(single.samples() == std::vector<double>{5.0});

    CHECK_THROWS_AS(EmpiricalMeasure::from_samples(std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalMeasure::from_samples(std::vector<double>{1.0, std::nan("")}),
                    std::invalid_argument);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> draws(10'000);
    for (double& v : draws) v = normal(rng);
    const auto big = EmpiricalMeasure::from_samples(draws);
    CHECK(big.size() == 10'000);
    CHECK(std::is_sorted(big.samples().begin(), big.samples().end()));
}

TEST_CASE("clip_pushforward clamps atoms and keeps supported measures fixed") {
    const auto mu = EmpiricalMeasure::from_samples(std::vector<double>{-1.0, 0.5, 2.0});
    CHECK(clip_pushforward(mu, 1.0).samples() == std::vector<double>{0.0, 0.5, 1.0});

    const auto inside = EmpiricalMeasure::from_samples(std::vector<double>{0.2, 0.8});
    CHECK(clip_pushforward(inside, 1.0).samples() == inside.samples());

    const auto above = EmpiricalMeasure::from_samples(std::vector<double>{3.0, 4.0, 9.0});
    const auto clipped = clip_pushforward(above, 2.0);
    const auto point = EmpiricalMeasure::from_samples(std::vector<double>{2.0, 2.0, 2.0});
    CHECK(wasserstein(clipped, point, 1.0) == 0.0);

    CHECK_THROWS_AS(clip_pushforward(mu, -1.0), std::invalid_argument);
}

TEST_CASE("moments") {
    const auto zero = EmpiricalMeasure::from_samples(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(moment(zero, 1.0) == 0.0);
    CHECK(moment(zero, 3.5) == 0.0);

    const auto two = EmpiricalMeasure::from_samples(std::vector<double>{1.0, 3.0});
    CHECK(moment(two, 2.0) == doctest::Approx(5.0).epsilon(1e-15));

    const auto sym = EmpiricalMeasure::from_samples(std::vector<double>{-2.0, 2.0});
    CHECK(moment(sym, 1.0) == 2.0);
    CHECK(mean(sym) == 0.0);
}

TEST_CASE("wasserstein basics") {
    const auto mu = EmpiricalMeasure::from_samples(std::vector<double>{0.0, 1.0});
    CHECK(wasserstein(mu, mu, 2.0) == 0.0);

    const auto nu = EmpiricalMeasure::from_samples(std::vector<double>{0.5, 2.0});
    CHECK(wasserstein(mu, nu, 1.0) == doctest::Approx(0.75).epsilon(1e-15));

    const auto zeros = EmpiricalMeasure::from_samples(std::vector<double>(7, 0.0));
    const auto ones = EmpiricalMeasure::from_samples(std::vector<double>(7, 1.0));
    for (double p : {1.0, 2.0, 3.0})
        CHECK(wasserstein(zeros, ones, p) == doctest::Approx(1.0).epsilon(1e-15));

    const auto bigger = EmpiricalMeasure::from_samples(std::vector<double>{0.0, 1.0, 2.0});
    CHECK_THROWS_AS(wasserstein(mu, bigger, 1.0), std::invalid_argument);
}

TEST_CASE("oracle on tiny inputs") {
    const auto a = EmpiricalMeasure::from_samples(std::vector<double>{0.0, 1.0});
    const auto b = EmpiricalMeasure::from_samples(std::vector<double>{1.0, 0.0});
    CHECK(wasserstein_oracle(a, b, 2.0) == 0.0);

    const auto x = EmpiricalMeasure::from_samples(std::vector<double>{3.0});
    const auto y = EmpiricalMeasure::from_samples(std::vector<double>{-1.5});
    CHECK(wasserstein_oracle(x, y, 1.0) == 4.5);

    const auto big = EmpiricalMeasure::from_samples(std::vector<double>(9, 0.0));
    CHECK_THROWS_AS(wasserstein_oracle(big, big, 1.0), std::invalid_argument);
}

TEST_CASE("sorted coupling equals the permutation oracle") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> size_dist(1, 7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = size_dist(rng);
        const auto mu = random_measure(rng, n);
        const auto nu = random_measure(rng, n);
        for (double p : {1.0, 2.0, 3.0}) {
            const double fast = wasserstein(mu, nu, p);
            const double slow = wasserstein_oracle(mu, nu, p);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("triangle inequality and order domination") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto mu = random_measure(rng, 6);
        const auto nu = random_measure(rng, 6);
        const auto rho = random_measure(rng, 6);
        for (double p : {1.0, 2.0, 3.0}) {
            CHECK(wasserstein(mu, rho, p) <=
                  wasserstein(mu, nu, p) + wasserstein(nu, rho, p) + 1e-12);
            CHECK(wasserstein(mu, nu, 1.0) <= wasserstein(mu, nu, p) + 1e-12);
        }
    }
}

TEST_CASE("clipping is idempotent and 1-Lipschitz in W_p") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto mu = random_measure(rng, 5);
        const auto nu = random_measure(rng, 5);
        const double y = std::uniform_real_distribution<double>(0.0, 8.0)(rng);
        const auto cmu = clip_pushforward(mu, y);
        CHECK(clip_pushforward(cmu, y).samples() == cmu.samples());
        for (double p : {1.0, 2.0})
            CHECK(wasserstein(cmu, clip_pushforward(nu, y), p) <=
                  wasserstein(mu, nu, p) + 1e-12);
    }
}

TEST_CASE("quantile refinement handles unequal counts exactly") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> size_dist(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = size_dist(rng);
        const std::size_t m = size_dist(rng);
        const auto mu = random_measure(rng, n);
        const auto nu = random_measure(rng, m);
        // replicating every atom lcm/n (lcm/m) times leaves the quantile
        // functions unchanged, so the equal-count coupling is the truth
        const std::size_t lcm = std::lcm(n, m);
        std::vector<double> mu_rep, nu_rep;
        for (double v : mu.samples()) mu_rep.insert(mu_rep.end(), lcm / n, v);
        for (double v : nu.samples()) nu_rep.insert(nu_rep.end(), lcm / m, v);
        const auto mu_e = EmpiricalMeasure::from_samples(mu_rep);
        const auto nu_e = EmpiricalMeasure::from_samples(nu_rep);
        for (double p : {1.0, 2.0, 3.0})
            CHECK(wasserstein_quantile(mu, nu, p) ==
                  doctest::Approx(wasserstein(mu_e, nu_e, p)).epsilon(1e-12));
        CHECK(wasserstein_quantile(mu_e, nu_e, 2.0) ==
              doctest::Approx(wasserstein(mu_e, nu_e, 2.0)).epsilon(1e-12));
    }
}
