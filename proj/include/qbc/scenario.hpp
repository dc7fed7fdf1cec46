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
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "qbc/combining.hpp"
#include "qbc/quantization.hpp"
#include "qbc/transmission.hpp"

namespace qbc {

enum class FeedbackKind { Fixed, Scaled };

// Limited: beamform on fed-back codewords. Perfect: vector downlink with
// exact channel directions (each mobile's first antenna), the ZF-CSIT
// reference.
enum class Csit { Limited, Perfect };

inline constexpr std::int64_t kDefaultTrials = 20000;

// Complete description of one Monte Carlo experiment.
struct Scenario {
    int M = 4;
    int N = 2;
    int K = 4;
    std::vector<double> snr_db{0.0, 10.0, 20.0};
    FeedbackKind feedback = FeedbackKind::Fixed;
    double bits = 10.0;   // Fixed
    double b_gap = 2.0;   // Scaled: target per-user gap log2(b_gap)
    Strategy strategy = Strategy::Qbc;
    Scheduler scheduler = Scheduler::EqualPower;
    CodebookMode codebook = CodebookMode::Emulated;
    Csit csit = Csit::Limited;
    double pilot_beta = std::numeric_limits<double>::infinity();
    std::int64_t trials = kDefaultTrials;
    std::uint64_t seed = 1;

    bool operator==(const Scenario&) const = default;
};

// Throws ConfigError naming the first violated invariant.
void validate(const Scenario& s);

// Flat "key = value" text, '#' comments, unknown keys rejected. The result
// is validated.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical text form; parse_scenario(to_config_text(s)) == s.
std::string to_config_text(const Scenario& s);

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// Hash of the canonical text.
std::string scenario_hash(const Scenario& s);

// Feedback bits per mobile at one SNR point. Scaled feedback keeps the raw
// real value for emulated codebooks and rounds up for explicit ones; both
// are clamped at zero.
double feedback_bits(const Scenario& s, double snr_db);

std::string_view to_string(CodebookMode m);
std::string_view to_string(Csit c);
std::string_view to_string(FeedbackKind f);

} // namespace qbc
