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
#ifndef MVSIS_TIME_FUNCTION_HPP
#define MVSIS_TIME_FUNCTION_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

namespace mvsis {

/// Scalar coefficient as a function of time, carrying a declared sup bound
/// on the simulation horizon. Measurability and local boundedness are the
/// caller's contract; boundedness is only verifiable by grid sampling.
class TimeFunction {
public:
    TimeFunction() : TimeFunction(0.0) {}

    // Constants are the common case in all presets; keep them implicit.
    TimeFunction(double c)
        : fn_([c](double) { return c; }), bound_(std::abs(c)), const_(c) {}

    TimeFunction(std::function<double(double)> fn, double bound)
        : fn_(std::move(fn)), bound_(bound) {
        if (!fn_) throw std::invalid_argument("TimeFunction: empty callable");
        if (!(bound_ >= 0.0)) throw std::invalid_argument("TimeFunction: bound must be >= 0");
    }

    double operator()(double t) const { return fn_(t); }

    /// Declared sup of |f| on [0, T].
    double bound() const { return bound_; }

    /// Set when the function is known constant (enables automatic limits).
    std::optional<double> constant_value() const { return const_; }

    bool is_constant() const { return const_.has_value(); }

private:
    std::function<double(double)> fn_;
    double bound_ = 0.0;
    std::optional<double> const_;
};

/// Population size together with its a.e. derivative. The derivative must be
/// supplied analytically; the constant constructor is the default.
struct PopulationFunction {
    TimeFunction size;        // N(t), must stay positive on [0, T]
    TimeFunction derivative;  // dN/dt, identically 0 for constant N

    static PopulationFunction constant(double n0) {
        if (!(n0 > 0.0)) throw std::invalid_argument("PopulationFunction: N must be positive");
        return PopulationFunction{TimeFunction(n0), TimeFunction(0.0)};
    }

    bool is_constant() const { return size.is_constant() && derivative.is_constant(); }
};

} // namespace mvsis

#endif
