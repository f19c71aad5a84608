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
#include "mvsis/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace mvsis {

namespace {

double abs_pow(double x, double p) {
    const double a = std::abs(x);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    return std::pow(a, p);
}

void require_order(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("order p must be >= 1");
}

} // namespace

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 16) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("EmpiricalMeasure: empty sample");
    EmpiricalMeasure mu;
    mu.samples_.assign(values.begin(), values.end());
    for (double v : mu.samples_) {
        if (!std::isfinite(v)) throw std::invalid_argument("EmpiricalMeasure: non-finite sample");
    }
    std::sort(mu.samples_.begin(), mu.samples_.end());
    return mu;
}

EmpiricalMeasure clip_pushforward(const EmpiricalMeasure& mu, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("clip_pushforward: y must be >= 0");
    std::vector<double> clipped(mu.samples());
    for (double& v : clipped) v = std::min(std::max(v, 0.0), y);
    // clipping is monotone, so sortedness is preserved
    return EmpiricalMeasure::from_samples(clipped);
}

double moment(const EmpiricalMeasure& mu, double p) {
    require_order(p);
    std::vector<double> powers(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) powers[i] = abs_pow(mu.samples()[i], p);
    return pairwise_sum(powers) / static_cast<double>(mu.size());
}

double mean(const EmpiricalMeasure& mu) {
    return pairwise_sum(mu.samples()) / static_cast<double>(mu.size());
}

double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    require_order(p);
    if (mu.size() != nu.size())
        throw std::invalid_argument("wasserstein: sample counts differ; use wasserstein_quantile");
    const std::size_t n = mu.size();
    std::vector<double> costs(n);
    for (std::size_t i = 0; i < n; ++i)
        costs[i] = abs_pow(mu.samples()[i] - nu.samples()[i], p);
    return std::pow(pairwise_sum(costs) / static_cast<double>(n), 1.0 / p);
}

double wasserstein_quantile(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    require_order(p);
    const auto& x = mu.samples();
    const auto& y = nu.samples();
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const std::int64_t m = static_cast<std::int64_t>(y.size());
    // Walk the merged jump grid in exact units of 1/(n*m).
    const double total = static_cast<double>(n) * static_cast<double>(m);
    std::int64_t i = 0, j = 0, u = 0;
    std::vector<double> pieces;
    pieces.reserve(static_cast<std::size_t>(n + m));
    while (i < n && j < m) {
        const std::int64_t xi_end = (i + 1) * m;
        const std::int64_t yj_end = (j + 1) * n;
        const std::int64_t next = std::min(xi_end, yj_end);
        pieces.push_back(abs_pow(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)], p) *
                         (static_cast<double>(next - u) / total));
        u = next;
        if (next == xi_end) ++i;
        if (next == yj_end) ++j;
    }
    return std::pow(pairwise_sum(pieces), 1.0 / p);
}

double wasserstein_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    require_order(p);
    if (mu.size() != nu.size())
        throw std::invalid_argument("wasserstein_oracle: sample counts differ");
    const std::size_t n = mu.size();
    if (n > 8) throw std::invalid_argument("wasserstein_oracle: n must be <= 8");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cost += abs_pow(mu.samples()[i] - nu.samples()[perm[i]], p);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(n), 1.0 / p);
}

} // namespace mvsis
