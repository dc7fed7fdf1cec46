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

#include "qbc/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <json.hpp>

#include "qbc/errors.hpp"

namespace qbc {

using Json = nlohmann::ordered_json;

Format parse_format(std::string_view name) {
    if (name == "csv")
        return Format::Csv;
    if (name == "json")
        return Format::Json;
    throw ConfigError("bad_value", "unknown output format '" + std::string(name) + "', expected csv or json");
}

bool LemmaReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

namespace {

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

template <typename Int>
std::string num_int(Int x) {
    return std::to_string(x);
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

Json parse(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw IoError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename F>
auto decode(F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw IoError(std::string("JSON does not match the expected schema: ") + e.what());
    }
}

} // namespace

std::string to_csv(const RateCurve& c) {
    std::string out = "snr_db,sum_rate,per_user_rate,stderr,trials,scenario_hash\n";
    for (const RatePoint& p : c.points)
        out += num(p.snr_db) + ',' + num(p.sum_rate) + ',' + num(p.per_user_rate) + ',' + num(p.std_error) + ',' +
               num_int(p.trials) + ',' + c.scenario_hash + '\n';
    return out;
}

std::string to_json(const RateCurve& c) {
    Json j;
    j["scenario_hash"] = c.scenario_hash;
    j["code_version"] = c.code_version;
    j["points"] = Json::array();
    for (const RatePoint& p : c.points)
        j["points"].push_back({{"snr_db", p.snr_db},
                               {"sum_rate", p.sum_rate},
                               {"per_user_rate", p.per_user_rate},
                               {"stderr", p.std_error},
                               {"trials", p.trials}});
    return dump(j);
}

RateCurve rate_curve_from_json(std::string_view text) {
    const Json j = parse(text);
    return decode([&] {
        RateCurve c;
        c.scenario_hash = j.at("scenario_hash").get<std::string>();
        c.code_version = j.at("code_version").get<std::string>();
        for (const Json& p : j.at("points"))
            c.points.push_back({p.at("snr_db").get<double>(), p.at("sum_rate").get<double>(),
                                p.at("per_user_rate").get<double>(), p.at("stderr").get<double>(),
                                p.at("trials").get<std::int64_t>()});
        return c;
    });
}

std::string to_csv(const ErrorCurve& c) {
    std::string out = "bits,mean_sin2,log2_mean_sin2,stderr,trials,scenario_hash\n";
    for (const ErrorPoint& p : c.points)
        out += num(p.bits) + ',' + num(p.mean_sin2) + ',' + num(p.log2_mean_sin2) + ',' + num(p.std_error) + ',' +
               num_int(p.trials) + ',' + c.scenario_hash + '\n';
    return out;
}

std::string to_json(const ErrorCurve& c) {
    Json j;
    j["scenario_hash"] = c.scenario_hash;
    j["code_version"] = c.code_version;
    j["points"] = Json::array();
    for (const ErrorPoint& p : c.points)
        j["points"].push_back({{"bits", p.bits},
                               {"mean_sin2", p.mean_sin2},
                               {"log2_mean_sin2", p.log2_mean_sin2},
                               {"stderr", p.std_error},
                               {"trials", p.trials}});
    return dump(j);
}

ErrorCurve error_curve_from_json(std::string_view text) {
    const Json j = parse(text);
    return decode([&] {
        ErrorCurve c;
        c.scenario_hash = j.at("scenario_hash").get<std::string>();
        c.code_version = j.at("code_version").get<std::string>();
        for (const Json& p : j.at("points"))
            c.points.push_back({p.at("bits").get<double>(), p.at("mean_sin2").get<double>(),
                                p.at("log2_mean_sin2").get<double>(), p.at("stderr").get<double>(),
                                p.at("trials").get<std::int64_t>()});
        return c;
    });
}

std::string to_csv(const LemmaReport& r) {
    std::string out = "check,null_law,ks_statistic,threshold,expect_reject,passed,M,N,bits,trials,seed\n";
    for (const LemmaCheck& c : r.checks)
        out += c.name + ',' + c.null_law + ',' + num(c.statistic) + ',' + num(c.threshold) + ',' +
               (c.expect_reject ? "true" : "false") + ',' + (c.passed ? "true" : "false") + ',' + num_int(r.M) +
               ',' + num_int(r.N) + ',' + num_int(r.bits) + ',' + num_int(r.trials) + ',' + num_int(r.seed) + '\n';
    return out;
}

std::string to_json(const LemmaReport& r) {
    Json j;
    j["M"] = r.M;
    j["N"] = r.N;
    j["bits"] = r.bits;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["code_version"] = r.code_version;
    j["all_passed"] = r.all_passed();
    j["checks"] = Json::array();
    for (const LemmaCheck& c : r.checks)
        j["checks"].push_back({{"check", c.name},
                               {"null_law", c.null_law},
                               {"ks_statistic", c.statistic},
                               {"threshold", c.threshold},
                               {"expect_reject", c.expect_reject},
                               {"passed", c.passed}});
    return dump(j);
}

LemmaReport lemma_report_from_json(std::string_view text) {
    const Json j = parse(text);
    return decode([&] {
        LemmaReport r;
        r.M = j.at("M").get<int>();
        r.N = j.at("N").get<int>();
        r.bits = j.at("bits").get<int>();
        r.trials = j.at("trials").get<std::int64_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.code_version = j.at("code_version").get<std::string>();
        for (const Json& c : j.at("checks"))
            r.checks.push_back({c.at("check").get<std::string>(), c.at("null_law").get<std::string>(),
                                c.at("ks_statistic").get<double>(), c.at("threshold").get<double>(),
                                c.at("expect_reject").get<bool>(), c.at("passed").get<bool>()});
        return r;
    });
}

std::string to_csv(const ScalingTable& t) {
    std::string out = "snr_db,N,bits_raw,bits,savings_raw,savings,M,b_gap\n";
    for (const ScalingRow& r : t.rows)
        out += num(r.snr_db) + ',' + num_int(r.N) + ',' + num(r.bits_raw) + ',' + num_int(r.bits) + ',' +
               num(r.savings_raw) + ',' + num_int(r.savings) + ',' + num_int(t.M) + ',' + num(t.b_gap) + '\n';
    return out;
}

std::string to_json(const ScalingTable& t) {
    Json j;
    j["M"] = t.M;
    j["b_gap"] = t.b_gap;
    j["code_version"] = t.code_version;
    j["rows"] = Json::array();
    for (const ScalingRow& r : t.rows)
        j["rows"].push_back({{"snr_db", r.snr_db},
                             {"N", r.N},
                             {"bits_raw", r.bits_raw},
                             {"bits", r.bits},
                             {"savings_raw", r.savings_raw},
                             {"savings", r.savings}});
    return dump(j);
}

ScalingTable scaling_table_from_json(std::string_view text) {
    const Json j = parse(text);
    return decode([&] {
        ScalingTable t;
        t.M = j.at("M").get<int>();
        t.b_gap = j.at("b_gap").get<double>();
        t.code_version = j.at("code_version").get<std::string>();
        for (const Json& r : j.at("rows"))
            t.rows.push_back({r.at("snr_db").get<double>(), r.at("N").get<int>(), r.at("bits_raw").get<double>(),
                              r.at("bits").get<int>(), r.at("savings_raw").get<double>(),
                              r.at("savings").get<int>()});
        return t;
    });
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

} // namespace qbc
