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

#include "qbc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qbc/distributions.hpp"
#include "qbc/errors.hpp"

namespace qbc {

std::string_view to_string(CodebookMode m) {
    return m == CodebookMode::Explicit ? "explicit" : "emulated";
}

std::string_view to_string(Csit c) {
    return c == Csit::Limited ? "limited" : "perfect";
}

std::string_view to_string(FeedbackKind f) {
    return f == FeedbackKind::Fixed ? "fixed" : "scaled";
}

namespace {

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("bad_value", "key '" + std::string(key) + "' has value '" + std::string(value) +
                                       "', expected " + std::string(expected));
}

double parse_real(std::string_view key, std::string_view v) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad_value(key, v, "a real number");
    return x;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
    Int x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad_value(key, v, "an integer");
    return x;
}

std::vector<double> parse_real_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(parse_real(key, trim(v.substr(0, comma))));
        if (comma == std::string_view::npos)
            break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty())
        bad_value(key, v, "a comma-separated list of reals");
    return out;
}

CodebookMode parse_codebook(std::string_view v) {
    if (v == "explicit")
        return CodebookMode::Explicit;
    if (v == "emulated")
        return CodebookMode::Emulated;
    bad_value("codebook", v, "explicit or emulated");
}

Csit parse_csit(std::string_view v) {
    if (v == "limited")
        return Csit::Limited;
    if (v == "perfect")
        return Csit::Perfect;
    bad_value("csit", v, "limited or perfect");
}

FeedbackKind parse_feedback(std::string_view v) {
    if (v == "fixed")
        return FeedbackKind::Fixed;
    if (v == "scaled")
        return FeedbackKind::Scaled;
    bad_value("feedback", v, "fixed or scaled");
}

void require(bool ok, const char* rule, const std::string& what) {
    if (!ok)
        throw ConfigError(rule, what);
}

} // namespace

double feedback_bits(const Scenario& s, double snr_db) {
    if (s.feedback == FeedbackKind::Fixed)
        return s.bits;
    const double raw = std::max(0.0, feedback_scaling(make_scaling_inputs(s.M, s.N, s.b_gap, snr_db)));
    return s.codebook == CodebookMode::Explicit ? std::ceil(raw) : raw;
}

void validate(const Scenario& s) {
    require(s.M >= 2, "M_at_least_2", "M=" + std::to_string(s.M));
    require(s.N >= 1 && s.N < s.M, "N_less_than_M",
            "need 1 <= N < M, got N=" + std::to_string(s.N) + ", M=" + std::to_string(s.M));
    require(s.K >= 1, "K_positive", "K=" + std::to_string(s.K));
    require(s.trials >= 1, "trials_positive", "trials=" + std::to_string(s.trials));
    require(!s.snr_db.empty(), "snr_grid", "SNR grid is empty");
    for (std::size_t i = 0; i < s.snr_db.size(); ++i) {
        require(std::isfinite(s.snr_db[i]), "snr_grid", "SNR values must be finite");
        require(i == 0 || s.snr_db[i] > s.snr_db[i - 1], "snr_grid", "SNR grid must be strictly increasing");
    }
    require(s.pilot_beta >= 1.0, "pilot_beta_at_least_1", "pilot_beta=" + format_double(s.pilot_beta));
    if (s.scheduler == Scheduler::EqualPower)
        require(s.K >= s.M, "equal_power_needs_K_ge_M",
                "equal-power scheduling serves M=" + std::to_string(s.M) + " mobiles, K=" + std::to_string(s.K));
    if (s.csit == Csit::Perfect)
        return;

    require(!(s.strategy == Strategy::Mrc && s.codebook == CodebookMode::Emulated), "mrc_requires_explicit",
            "MRC has no emulated error law; set codebook = explicit");
    if (s.feedback == FeedbackKind::Fixed) {
        require(std::isfinite(s.bits) && s.bits >= 0.0, "bits_nonnegative", "bits=" + format_double(s.bits));
        if (s.codebook == CodebookMode::Explicit) {
            require(s.bits == std::floor(s.bits), "explicit_bits_integer",
                    "explicit codebooks need integer bits, got " + format_double(s.bits));
            require(s.bits <= kMaxExplicitBits, "explicit_bits_limit",
                    "B=" + format_double(s.bits) + " exceeds " + std::to_string(kMaxExplicitBits) +
                        " for an explicit codebook; use codebook = emulated");
        }
    } else {
        for (double snr : s.snr_db) {
            const double b = feedback_bits(s, snr);
            if (s.codebook == CodebookMode::Explicit)
                require(b <= kMaxExplicitBits, "explicit_bits_limit",
                        "scaled feedback needs B=" + format_double(b) + " at " + format_double(snr) +
                            " dB, above " + std::to_string(kMaxExplicitBits) +
                            " for an explicit codebook; use codebook = emulated");
        }
    }
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::map<std::string, int> seen;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("syntax", "line " + std::to_string(line_no) + ": expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("syntax", "line " + std::to_string(line_no) + ": empty value for '" +
                                            std::string(key) + "'");
        if (seen[std::string(key)]++ > 0)
            throw ConfigError("duplicate_key", "key '" + std::string(key) + "' given twice");

        if (key == "M")
            s.M = parse_int<int>(key, value);
        else if (key == "N")
            s.N = parse_int<int>(key, value);
        else if (key == "K")
            s.K = parse_int<int>(key, value);
        else if (key == "snr_db")
            s.snr_db = parse_real_list(key, value);
        else if (key == "feedback")
            s.feedback = parse_feedback(value);
        else if (key == "bits")
            s.bits = parse_real(key, value);
        else if (key == "b_gap")
            s.b_gap = parse_real(key, value);
        else if (key == "strategy")
            s.strategy = parse_strategy(value);
        else if (key == "scheduler")
            s.scheduler = parse_scheduler(value);
        else if (key == "codebook")
            s.codebook = parse_codebook(value);
        else if (key == "csit")
            s.csit = parse_csit(value);
        else if (key == "pilot_beta")
            s.pilot_beta = parse_real(key, value);
        else if (key == "trials")
            s.trials = parse_int<std::int64_t>(key, value);
        else if (key == "seed")
            s.seed = parse_int<std::uint64_t>(key, value);
        else
            throw ConfigError("unknown_key", "line " + std::to_string(line_no) + ": unknown key '" +
                                                 std::string(key) + "'");
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string to_config_text(const Scenario& s) {
    std::string out;
    auto put = [&out](std::string_view key, const std::string& value) {
        out.append(key).append(" = ").append(value).push_back('\n');
    };
    put("M", std::to_string(s.M));
    put("N", std::to_string(s.N));
    put("K", std::to_string(s.K));
    std::string grid;
    for (std::size_t i = 0; i < s.snr_db.size(); ++i)
        grid += (i ? "," : "") + format_double(s.snr_db[i]);
    put("snr_db", grid);
    put("feedback", std::string(to_string(s.feedback)));
    put("bits", format_double(s.bits));
    put("b_gap", format_double(s.b_gap));
    put("strategy", std::string(to_string(s.strategy)));
    put("scheduler", std::string(to_string(s.scheduler)));
    put("codebook", std::string(to_string(s.codebook)));
    put("csit", std::string(to_string(s.csit)));
    put("pilot_beta", format_double(s.pilot_beta));
    put("trials", std::to_string(s.trials));
    put("seed", std::to_string(s.seed));
    return out;
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4)
        out[std::size_t(i)] = digits[h & 0xf];
    return out;
}

std::string scenario_hash(const Scenario& s) {
    return fnv1a_hex(to_config_text(s));
}

} // namespace qbc
