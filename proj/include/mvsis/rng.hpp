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
#ifndef MVSIS_RNG_HPP
#define MVSIS_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace mvsis {

// Salmon et al., SC 2011. Parallel random numbers: as easy as 1, 2, 3.
namespace philox {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

/// philox4x32-10 block function.
inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        round_once(ctr, key);
    }
    return ctr;
}

} // namespace philox

/// Keyed deterministic generator: one standard normal per
/// (particle, coordinate, step, substream), independent of evaluation order
/// and worker count. Substream 0 carries the step increments, substream 1
/// the bridge draws used by interpolation.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    double normal(std::uint64_t particle, std::uint32_t coord, std::uint64_t step,
                  std::uint32_t substream = 0) const {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(step),
            static_cast<std::uint32_t>(step >> 32),
            static_cast<std::uint32_t>(particle),
            coord | (substream << 16),
        };
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32),
        };
        const auto words = philox::block(ctr, key);
        const std::uint64_t a = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
        // Box-Muller; u1 in (0,1] keeps the log finite.
        const double u1 = static_cast<double>((a >> 11) + 1) * 0x1p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t seed_;
};

} // namespace mvsis

#endif
