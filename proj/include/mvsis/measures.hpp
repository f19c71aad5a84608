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
#ifndef MVSIS_MEASURES_HPP
#define MVSIS_MEASURES_HPP

#include <span>
#include <vector>

namespace mvsis {

/// Uniform-weight empirical probability measure on the line.
/// Samples are kept sorted nondecreasing; the input order is not retained.
class EmpiricalMeasure {
public:
    static EmpiricalMeasure from_samples(std::span<const double> values);
    static EmpiricalMeasure from_samples(const std::vector<double>& values) {
        return from_samples(std::span<const double>(values));
    }

    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<double> samples_;
};

/// Image measure under x -> min(max(x, 0), y); identity when the support
/// already lies in [0, y].
EmpiricalMeasure clip_pushforward(const EmpiricalMeasure& mu, double y);

/// (1/n) sum |x_i|^p for p >= 1.
double moment(const EmpiricalMeasure& mu, double p);

/// Signed first moment.
double mean(const EmpiricalMeasure& mu);

/// p-Wasserstein distance via the monotone (sorted) coupling.
/// Requires equal sample counts.
double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// p-Wasserstein distance between empirical measures of arbitrary sizes,
/// evaluating both quantile functions on the merged grid of jump points.
/// Exact for piecewise-constant quantiles; agrees with wasserstein() when
/// the counts match.
double wasserstein_quantile(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Exhaustive-permutation oracle, minimum over all n! pairings. n <= 8.
double wasserstein_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Summation with a fixed pairwise reduction tree; the result depends only on
/// the element order, never on chunking or worker count.
double pairwise_sum(std::span<const double> values);

} // namespace mvsis

#endif
