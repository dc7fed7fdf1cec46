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

#include "qbc/presets.hpp"

#include <map>

#include "qbc/analysis.hpp"
#include "qbc/errors.hpp"
#include "qbc/transmission.hpp"

namespace qbc {

namespace {

std::vector<double> grid(double from, double to, double step) {
    std::vector<double> out;
    for (double x = from; x <= to + 1e-9; x += step)
        out.push_back(x);
    return out;
}

PresetJob rate_job(std::string label, Scenario s) {
    PresetJob j;
    j.label = std::move(label);
    j.scenario = std::move(s);
    return j;
}

Scenario zf_csit(Scenario s) {
    s.N = 1;
    s.csit = Csit::Perfect;
    s.strategy = Strategy::None;
    return s;
}

Preset fig3() {
    Preset p{"fig3", "sum rate, M=K=6, N=1,2,3, feedback scaled with b=2, with ZF and BD CSIT references", {}};
    Scenario base;
    base.M = 6;
    base.K = 6;
    base.snr_db = grid(0, 30, 5);
    base.feedback = FeedbackKind::Scaled;
    base.b_gap = 2.0;
    base.codebook = CodebookMode::Emulated;
    base.strategy = Strategy::Qbc;
    p.jobs.push_back(rate_job("zf_csit", zf_csit(base)));
    for (int n : {1, 2, 3}) {
        Scenario s = base;
        s.N = n;
        p.jobs.push_back(rate_job("qbc_N" + std::to_string(n), s));
    }
    for (int n : {2, 3}) {
        PresetJob bd;
        bd.label = "bd_csit_N" + std::to_string(n);
        bd.kind = JobKind::BdReference;
        bd.scenario = zf_csit(base);
        bd.reference = "zf_csit";
        bd.bd_antennas = n;
        p.jobs.push_back(bd);
    }
    return p;
}

Preset fig4() {
    Preset p{"fig4", "mean quantization error against feedback bits, M=4, N=2, per combining strategy", {}};
    Scenario base;
    base.M = 4;
    base.N = 2;
    base.K = 1;
    base.scheduler = Scheduler::GreedyWaterfilling;
    base.codebook = CodebookMode::Explicit;
    base.trials = 4000;
    const std::vector<double> bits = grid(2, 14, 2);
    for (Strategy st : {Strategy::Qbc, Strategy::AntennaSelection, Strategy::Mrc, Strategy::MaxEigenvector,
                        Strategy::None}) {
        PresetJob j;
        j.label = std::string(to_string(st));
        j.kind = JobKind::ErrorSweep;
        j.scenario = base;
        j.scenario.strategy = st;
        j.sweep_bits = bits;
        p.jobs.push_back(std::move(j));
    }
    return p;
}

Preset fig5() {
    Preset p{"fig5", "QBC with receiver estimation error, M=4, N=2, K=4, scaled feedback, beta = inf, 1, 2", {}};
    Scenario base;
    base.M = 4;
    base.N = 2;
    base.K = 4;
    base.snr_db = grid(0, 30, 5);
    base.feedback = FeedbackKind::Scaled;
    base.b_gap = 2.0;
    p.jobs.push_back(rate_job("zf_csit", zf_csit(base)));
    p.jobs.push_back(rate_job("qbc_perfect_csir", base));
    for (int beta : {1, 2}) {
        Scenario s = base;
        s.pilot_beta = beta;
        p.jobs.push_back(rate_job("qbc_beta" + std::to_string(beta), s));
    }
    return p;
}

void add_combining_curves(Preset& p, const Scenario& base, bool with_mrc) {
    p.jobs.push_back(rate_job("zf_csit", zf_csit(base)));
    std::vector<Strategy> strategies{Strategy::Qbc, Strategy::AntennaSelection, Strategy::MaxEigenvector};
    if (with_mrc)
        strategies.push_back(Strategy::Mrc);
    for (Strategy st : strategies) {
        Scenario s = base;
        s.strategy = st;
        p.jobs.push_back(rate_job(std::string(to_string(st)), s));
    }
    Scenario single = base;
    single.N = 1;
    single.strategy = Strategy::None;
    p.jobs.push_back(rate_job("single_antenna", single));
}

Preset fig6() {
    Preset p{"fig6", "combining strategies, M=4, N=2, K=4, B=10 fixed", {}};
    Scenario base;
    base.M = 4;
    base.N = 2;
    base.K = 4;
    base.snr_db = grid(0, 30, 5);
    base.feedback = FeedbackKind::Fixed;
    base.bits = 10;
    base.codebook = CodebookMode::Explicit;
    add_combining_curves(p, base, true);
    return p;
}

Preset combining_scaled() {
    Preset p{"combining_scaled", "combining strategies, M=4, N=2, K=4, feedback scaled with b=2 (no MRC)", {}};
    Scenario base;
    base.M = 4;
    base.N = 2;
    base.K = 4;
    base.snr_db = grid(0, 30, 5);
    base.feedback = FeedbackKind::Scaled;
    base.b_gap = 2.0;
    add_combining_curves(p, base, false);
    return p;
}

Preset fig7() {
    Preset p{"fig7", "greedy user selection against K, M=4, N=2, B=10, 10 dB", {}};
    Scenario base;
    base.M = 4;
    base.N = 2;
    base.snr_db = {10.0};
    base.bits = 10;
    base.codebook = CodebookMode::Explicit;
    base.scheduler = Scheduler::GreedyWaterfilling;
    base.trials = 2000;
    for (int k : {4, 6, 10, 15, 20}) {
        Scenario s = base;
        s.K = k;
        const std::string suffix = "_K" + std::to_string(k);
        p.jobs.push_back(rate_job("zf_csit" + suffix, zf_csit(s)));
        for (Strategy st : {Strategy::Qbc, Strategy::Mrc, Strategy::AntennaSelection}) {
            s.strategy = st;
            p.jobs.push_back(rate_job(std::string(to_string(st)) + suffix, s));
        }
    }
    return p;
}

Preset fig8() {
    Preset p{"fig8", "greedy user selection against K, M=6, N=1,2, B=10,15,20, 10 dB", {}};
    Scenario base;
    base.M = 6;
    base.snr_db = {10.0};
    base.codebook = CodebookMode::Emulated;
    base.scheduler = Scheduler::GreedyWaterfilling;
    base.strategy = Strategy::Qbc;
    base.trials = 2000;
    for (int k : {6, 10, 15, 20, 30}) {
        Scenario s = base;
        s.K = k;
        const std::string suffix = "_K" + std::to_string(k);
        p.jobs.push_back(rate_job("zf_csit" + suffix, zf_csit(s)));
        for (int n : {1, 2})
            for (int b : {10, 15, 20}) {
                s.N = n;
                s.bits = b;
                p.jobs.push_back(rate_job("N" + std::to_string(n) + "_B" + std::to_string(b) + suffix, s));
            }
    }
    return p;
}

RateCurve bd_curve(const RateCurve& zf, const PresetJob& job) {
    const int M = job.scenario.M;
    const int n = job.bd_antennas;
    std::vector<double> sums;
    for (const RatePoint& pt : zf.points)
        sums.push_back(pt.sum_rate);
    const std::vector<double> shifted = bd_csit_reference(M, n, sums);
    RateCurve out;
    out.scenario_hash = fnv1a_hex(zf.scenario_hash + " bd_csit N=" + std::to_string(n));
    for (std::size_t i = 0; i < zf.points.size(); ++i) {
        RatePoint pt = zf.points[i];
        pt.sum_rate = shifted[i];
        pt.per_user_rate = shifted[i] / (static_cast<double>(M) / n);
        out.points.push_back(pt);
    }
    return out;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "combining_scaled"};
}

Preset make_preset(std::string_view name) {
    if (name == "fig3")
        return fig3();
    if (name == "fig4")
        return fig4();
    if (name == "fig5")
        return fig5();
    if (name == "fig6")
        return fig6();
    if (name == "fig7")
        return fig7();
    if (name == "fig8")
        return fig8();
    if (name == "combining_scaled")
        return combining_scaled();
    std::string known;
    for (const auto& n : preset_names())
        known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown_preset", "no preset named '" + std::string(name) + "' (known: " + known + ")");
}

void override_preset(Preset& p, std::optional<std::uint64_t> seed, std::optional<std::int64_t> trials) {
    for (PresetJob& j : p.jobs) {
        if (seed)
            j.scenario.seed = *seed;
        if (trials)
            j.scenario.trials = *trials;
    }
}

std::vector<PresetOutput> run_preset(const Preset& p, Format f, const RunOptions& opts) {
    const std::string ext = f == Format::Csv ? ".csv" : ".json";
    std::map<std::string, RateCurve> rate_curves;
    std::vector<PresetOutput> out;
    for (const PresetJob& j : p.jobs) {
        std::string text;
        switch (j.kind) {
        case JobKind::Rate: {
            RateCurve c = run_scenario(j.scenario, opts);
            text = serialize(c, f);
            rate_curves.emplace(j.label, std::move(c));
            break;
        }
        case JobKind::ErrorSweep:
            text = serialize(run_error_sweep(j.scenario, j.sweep_bits, opts), f);
            break;
        case JobKind::BdReference: {
            const auto ref = rate_curves.find(j.reference);
            if (ref == rate_curves.end())
                throw PreconditionError("BD reference job '" + j.label + "' precedes its source '" + j.reference + "'");
            text = serialize(bd_curve(ref->second, j), f);
            break;
        }
        }
        out.push_back({p.name + "_" + j.label + ext, std::move(text)});
    }
    return out;
}

std::vector<std::filesystem::path> write_preset(const Preset& p, Format f, const std::filesystem::path& dir,
                                                const RunOptions& opts) {
    std::vector<std::filesystem::path> paths;
    for (const PresetOutput& o : run_preset(p, f, opts)) {
        paths.push_back(dir / o.file_name);
        write_text(paths.back(), o.contents);
    }
    return paths;
}

} // namespace qbc
