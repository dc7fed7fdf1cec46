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

#include <cstdint>
#include <span>
#include <vector>

#include "qbc/engine.hpp"
#include "qbc/report.hpp"
#include "qbc/scenario.hpp"

namespace qbc {

// Per-trial observations of brute-force QBC with a fresh explicit codebook:
// sin^2 between codeword and effective channel, ||h_eff||^2, and
// |h_eff^H x|^2 / ||h_eff||^2 for the fixed unit vector x = e_1.
struct LemmaSamples {
    std::vector<double> error;
    std::vector<double> norm2;
    std::vector<double> projection;
};

LemmaSamples collect_lemma_samples(int M, int N, int bits, std::int64_t trials, std::uint64_t seed,
                                   const RunOptions& opts = {});

inline constexpr double kLemmaThreshold = 0.015;
inline constexpr double kMismatchThreshold = 0.05;

// KS tests of the three laws, plus a control against a deliberately wrong
// null that must be rejected.
LemmaReport verify_lemmas(int M, int N, int bits, std::int64_t trials, std::uint64_t seed,
                          const RunOptions& opts = {}, double threshold = kLemmaThreshold);

// Feedback bits per N (a row for N = 1 is always included as the savings
// baseline) at each SNR.
ScalingTable scaling_table(int M, std::span<const int> Ns, double b_gap, std::span<const double> snr_db);

// Mean direction error of s.strategy against the feedback bits, on one
// mobile per trial. Uses M, N, strategy, codebook, trials and seed of s.
ErrorCurve run_error_sweep(const Scenario& s, std::span<const double> bits, const RunOptions& opts = {});

} // namespace qbc
