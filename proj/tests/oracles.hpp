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
#ifndef MVSIS_TESTS_ORACLES_HPP
#define MVSIS_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

// Test-side references, independent of the library implementations.
namespace oracles {

/// Brute-force maximiser: dense grid scan followed by golden-section
/// refinement of the best bracket. `points` grid evaluations locate the
/// basin; the refinement narrows it to ~1e-13 relative width.
template <typename Fn>
double grid_max(const Fn& f, double lo, double hi, std::int64_t points = 1'000'000) {
    if (hi <= lo) return f(lo);
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_i = 0;
    const double span = hi - lo;
    for (std::int64_t i = 0; i <= points; ++i) {
        const double x = lo + span * static_cast<double>(i) / static_cast<double>(points);
        const double v = f(x);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    double a = lo + span * static_cast<double>(std::max<std::int64_t>(best_i - 1, 0)) /
                        static_cast<double>(points);
    double b = lo + span * static_cast<double>(std::min(best_i + 1, points)) /
                        static_cast<double>(points);
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 120 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({best, f1, f2, f(0.5 * (a + b))});
}

/// Richardson-extrapolated explicit Euler reference for a scalar ODE.
template <typename Fn>
double ode_reference(const Fn& rhs, double x0, double horizon, std::int64_t base_steps) {
    const auto euler = [&](std::int64_t steps) {
        double x = x0;
        const double h = horizon / static_cast<double>(steps);
        for (std::int64_t j = 0; j < steps; ++j) x += rhs(h * static_cast<double>(j), x) * h;
        return x;
    };
    const double coarse = euler(base_steps);
    const double fine = euler(2 * base_steps);
    return 2.0 * fine - coarse;
}

} // namespace oracles

#endif
