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

#include "qbc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "qbc/combining.hpp"
#include "qbc/distributions.hpp"
#include "qbc/errors.hpp"
#include "qbc/linalg.hpp"
#include "qbc/quantization.hpp"
#include "qbc/random.hpp"

namespace qbc {

LemmaSamples collect_lemma_samples(int M, int N, int bits, std::int64_t trials, std::uint64_t seed,
                                   const RunOptions& opts) {
    if (!(N >= 1 && N < M))
        throw ConfigError("N_less_than_M", "need 1 <= N < M");
    if (bits < 0 || bits > kMaxExplicitBits)
        throw ConfigError("explicit_bits_limit", "lemma checks need an explicit codebook with 0 <= B <= " +
                                                     std::to_string(kMaxExplicitBits));
    if (trials < 1)
        throw ConfigError("trials_positive", "trials=" + std::to_string(trials));

    LemmaSamples out;
    out.error.resize(std::size_t(trials));
    out.norm2.resize(std::size_t(trials));
    out.projection.resize(std::size_t(trials));
    parallel_for(trials, opts.workers, [&](std::int64_t trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        RandomStream ch_rng = RandomStream::derive(seed, t, 0, Purpose::Channel);
        RandomStream cb_rng = RandomStream::derive(seed, t, 0, Purpose::Codebook);
        RandomStream unused = RandomStream::derive(seed, t, 0, Purpose::Emulation);
        const ChannelMatrix<double> H = sample_channel<double>(M, N, ch_rng);
        const Codebook<double> cb = Codebook<double>::explicit_rvq(M, bits, cb_rng);
        const EffectiveChannel<double> eff = qbc(H, cb, unused);
        const auto i = std::size_t(trial);
        out.error[i] = eff.direction_error();
        out.norm2[i] = eff.norm2;
        out.projection[i] = std::norm(eff.h_eff(0)) / eff.norm2;
    });
    return out;
}

namespace {

double ks_sorted(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    return ks_statistic(x, cdf);
}

} // namespace

LemmaReport verify_lemmas(int M, int N, int bits, std::int64_t trials, std::uint64_t seed, const RunOptions& opts,
                          double threshold) {
    const LemmaSamples samples = collect_lemma_samples(M, N, bits, trials, seed, opts);
    LemmaReport report;
    report.M = M;
    report.N = N;
    report.bits = bits;
    report.trials = trials;
    report.seed = seed;

    const QuantErrorLaw law{subspace_error_params(M, N), double(bits)};
    const int dof = M - N + 1;
    const BetaParams direction{1, M - 1};
    const QuantErrorLaw wrong{{M - 1, 1}, double(bits)};

    auto accept = [&](std::string name, std::string null_law, double d) {
        report.checks.push_back({std::move(name), std::move(null_law), d, threshold, false, d < threshold});
    };
    accept("quantization_error",
           "min of 2^" + std::to_string(bits) + " beta(" + std::to_string(law.beta.a) + "," +
               std::to_string(law.beta.b) + ")",
           ks_sorted(samples.error, [&](double z) { return min_beta_cdf(z, law); }));
    accept("effective_norm", "chi2 with " + std::to_string(2 * dof) + " dof (mean " + std::to_string(dof) + ")",
           ks_sorted(samples.norm2, [&](double x) { return chi2_2k_cdf(x, dof); }));
    accept("effective_direction", "beta(1," + std::to_string(M - 1) + ")",
           ks_sorted(samples.projection, [&](double x) { return beta_cdf(x, direction); }));

    const double d_wrong = ks_sorted(samples.error, [&](double z) { return min_beta_cdf(z, wrong); });
    report.checks.push_back({"mismatch_control",
                             "min of 2^" + std::to_string(bits) + " beta(" + std::to_string(M - 1) + ",1)", d_wrong,
                             kMismatchThreshold, true, d_wrong >= kMismatchThreshold});
    return report;
}

ScalingTable scaling_table(int M, std::span<const int> Ns, double b_gap, std::span<const double> snr_db) {
    ScalingTable table;
    table.M = M;
    table.b_gap = b_gap;
    std::vector<int> ns(Ns.begin(), Ns.end());
    ns.push_back(1);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (double snr : snr_db) {
        const double base = feedback_scaling(make_scaling_inputs(M, 1, b_gap, snr));
        const int base_bits = static_cast<int>(std::ceil(std::max(0.0, base)));
        for (int n : ns) {
            const double raw = feedback_scaling(make_scaling_inputs(M, n, b_gap, snr));
            const int rounded = static_cast<int>(std::ceil(std::max(0.0, raw)));
            table.rows.push_back({snr, n, raw, rounded, base - raw, base_bits - rounded});
        }
    }
    return table;
}

ErrorCurve run_error_sweep(const Scenario& s, std::span<const double> bits, const RunOptions& opts) {
    Scenario probe = s;
    probe.feedback = FeedbackKind::Fixed;
    probe.csit = Csit::Limited;
    probe.scheduler = Scheduler::GreedyWaterfilling;
    for (double b : bits) {
        probe.bits = b;
        validate(probe);
    }

    std::string key = to_config_text(s) + "sweep_bits =";
    for (double b : bits)
        key += " " + std::to_string(b);
    ErrorCurve curve;
    curve.scenario_hash = fnv1a_hex(key);

    const std::size_t nb = bits.size();
    std::vector<double> table(std::size_t(s.trials) * nb);
    parallel_for(s.trials, opts.workers, [&](std::int64_t trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        RandomStream ch_rng = RandomStream::derive(s.seed, t, 0, Purpose::Channel);
        const ChannelMatrix<double> H = sample_channel<double>(s.M, s.N, ch_rng);
        for (std::size_t b = 0; b < nb; ++b) {
            RandomStream cb_rng = RandomStream::derive(s.seed, t, 0, Purpose::Codebook);
            RandomStream emu = RandomStream::derive(s.seed, t, 0, Purpose::Emulation);
            const Codebook<double> cb = s.codebook == CodebookMode::Explicit
                                            ? Codebook<double>::explicit_rvq(s.M, int(bits[b]), cb_rng)
                                            : Codebook<double>::emulated(s.M, bits[b]);
            table[std::size_t(trial) * nb + b] = combine(s.strategy, H, cb, emu).direction_error();
        }
    });

    std::vector<double> column(std::size_t(s.trials));
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::int64_t t = 0; t < s.trials; ++t)
            column[std::size_t(t)] = table[std::size_t(t) * nb + b];
        const MeanSe m = mean_se(column);
        curve.points.push_back({bits[b], m.mean, std::log2(m.mean), m.se, s.trials});
    }
    return curve;
}

} // namespace qbc
