// SPDX-License-Identifier: Apache-2.0
//
// qbc-downlink: limited-feedback MIMO downlink simulation with receive combining
// Copyright (C) 2026 The qbc-downlink authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace qbc {

// What a derived stream is used for. Values are part of the reproducibility
// contract: changing them changes every simulated number.
enum class Purpose : std::uint64_t {
    Channel = 1,
    Codebook = 2,
    Emulation = 3,
    RxNoise = 4,
    Generic = 5,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

// One independent pseudo-random stream. Not thread-safe; each trial worker
// owns its streams. Streams for a given (seed, trial, mobile, purpose) key
// are identical no matter which thread or in which order they are created.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    static RandomStream derive(std::uint64_t master_seed, std::uint64_t trial,
                               std::uint64_t mobile, Purpose purpose) {
        std::uint64_t key = detail::splitmix64(master_seed);
        key = detail::splitmix64(key ^ trial);
        key = detail::splitmix64(key ^ (mobile * 0x100000001b3ULL));
        key = detail::splitmix64(key ^ static_cast<std::uint64_t>(purpose));
        return RandomStream(key);
    }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

    // Circularly-symmetric complex Gaussian with unit total variance.
    template <typename Real>
    std::complex<Real> complex_normal() {
        constexpr double scale = 0.70710678118654752440; // 1/sqrt(2)
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {static_cast<Real>(re * scale), static_cast<Real>(im * scale)};
    }

    std::mt19937_64& engine() noexcept { return engine_; }

  private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
};

} // namespace qbc
