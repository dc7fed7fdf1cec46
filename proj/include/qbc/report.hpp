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
#include <string>
#include <string_view>
#include <vector>

namespace qbc {

inline constexpr std::string_view kCodeVersion = "qbc-downlink 1.0.0";

enum class Format { Csv, Json };

Format parse_format(std::string_view name);

struct RatePoint {
    double snr_db = 0.0;
    double sum_rate = 0.0;       // bps/Hz
    double per_user_rate = 0.0;  // bps/Hz per served mobile
    double std_error = 0.0;      // of sum_rate
    std::int64_t trials = 0;

    bool operator==(const RatePoint&) const = default;
};

struct RateCurve {
    std::vector<RatePoint> points;
    std::string scenario_hash;
    std::string code_version{kCodeVersion};

    bool operator==(const RateCurve&) const = default;
};

// Mean quantization error against feedback bits.
struct ErrorPoint {
    double bits = 0.0;
    double mean_sin2 = 0.0;
    double log2_mean_sin2 = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;

    bool operator==(const ErrorPoint&) const = default;
};

struct ErrorCurve {
    std::vector<ErrorPoint> points;
    std::string scenario_hash;
    std::string code_version{kCodeVersion};

    bool operator==(const ErrorCurve&) const = default;
};

struct LemmaCheck {
    std::string name;
    std::string null_law;
    double statistic = 0.0;  // KS distance D
    double threshold = 0.0;
    bool expect_reject = false;
    bool passed = false;

    bool operator==(const LemmaCheck&) const = default;
};

struct LemmaReport {
    int M = 0;
    int N = 0;
    int bits = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<LemmaCheck> checks;
    std::string code_version{kCodeVersion};

    bool all_passed() const;
    bool operator==(const LemmaReport&) const = default;
};

// Feedback bits for one (SNR, N), raw and rounded up, with the savings
// relative to a single-antenna mobile.
struct ScalingRow {
    double snr_db = 0.0;
    int N = 1;
    double bits_raw = 0.0;
    int bits = 0;
    double savings_raw = 0.0;
    int savings = 0;

    bool operator==(const ScalingRow&) const = default;
};

struct ScalingTable {
    int M = 0;
    double b_gap = 0.0;
    std::vector<ScalingRow> rows;
    std::string code_version{kCodeVersion};

    bool operator==(const ScalingTable&) const = default;
};

// Serialization. Numbers use the shortest round-trip form; output always
// ends with a newline.
std::string to_csv(const RateCurve& c);
std::string to_json(const RateCurve& c);
std::string to_csv(const ErrorCurve& c);
std::string to_json(const ErrorCurve& c);
std::string to_csv(const LemmaReport& r);
std::string to_json(const LemmaReport& r);
std::string to_csv(const ScalingTable& t);
std::string to_json(const ScalingTable& t);

RateCurve rate_curve_from_json(std::string_view text);
ErrorCurve error_curve_from_json(std::string_view text);
LemmaReport lemma_report_from_json(std::string_view text);
ScalingTable scaling_table_from_json(std::string_view text);

template <typename T>
std::string serialize(const T& value, Format f) {
    return f == Format::Csv ? to_csv(value) : to_json(value);
}

// Writes text to path, creating parent directories. Throws IoError naming
// the path.
void write_text(const std::filesystem::path& path, std::string_view text);

template <typename T>
void emit(const T& value, Format f, const std::filesystem::path& path) {
    write_text(path, serialize(value, f));
}

} // namespace qbc
