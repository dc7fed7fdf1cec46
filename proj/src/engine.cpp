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

#include "qbc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "qbc/combining.hpp"
#include "qbc/distributions.hpp"
#include "qbc/errors.hpp"
#include "qbc/linalg.hpp"
#include "qbc/quantization.hpp"
#include "qbc/random.hpp"
#include "qbc/transmission.hpp"

namespace qbc {

unsigned resolve_workers(unsigned requested) {
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::int64_t count, unsigned workers, const std::function<void(std::int64_t)>& body) {
    if (count <= 0)
        return;
    workers = static_cast<unsigned>(std::min<std::int64_t>(resolve_workers(workers), count));
    const std::int64_t chunk = std::clamp<std::int64_t>(count / (std::int64_t(workers) * 16), 1, 256);

    std::atomic<std::int64_t> next{0};
    std::mutex failure_mutex;
    std::int64_t failed_at = count;
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::int64_t begin = next.fetch_add(chunk);
            if (begin >= count)
                return;
            const std::int64_t end = std::min(count, begin + chunk);
            for (std::int64_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (i < failed_at) {
                        failed_at = i;
                        failure = std::current_exception();
                    }
                }
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

namespace {

using Effective = EffectiveChannel<double>;

// Vector-downlink channel with exact directions: the mobile's first antenna.
Effective perfect_channel(const ChannelMatrix<double>& H) {
    Effective e;
    e.h_eff = H.matrix().col(0);
    e.gamma = CVector<double>::Unit(H.rx_antennas(), 0);
    e.norm2 = e.h_eff.squaredNorm();
    e.quant.direction = e.h_eff / std::sqrt(e.norm2);
    e.quant.sin2_error = 0.0;
    e.strategy = Strategy::None;
    return e;
}

Effective effective_channel(const Scenario& s, const ChannelMatrix<double>& H, std::int64_t trial, int mobile,
                            double bits, double snr) {
    if (s.csit == Csit::Perfect)
        return perfect_channel(H);
    const auto t = static_cast<std::uint64_t>(trial);
    const auto k = static_cast<std::uint64_t>(mobile);
    std::optional<Codebook<double>> cb;
    if (s.codebook == CodebookMode::Explicit) {
        RandomStream cb_rng = RandomStream::derive(s.seed, t, k, Purpose::Codebook);
        cb.emplace(Codebook<double>::explicit_rvq(s.M, static_cast<int>(bits), cb_rng));
    } else {
        cb.emplace(Codebook<double>::emulated(s.M, bits));
    }
    RandomStream emu = RandomStream::derive(s.seed, t, k, Purpose::Emulation);
    if (std::isinf(s.pilot_beta))
        return combine(s.strategy, H, *cb, emu);
    RandomStream noise = RandomStream::derive(s.seed, t, k, Purpose::RxNoise);
    const RxEstimate<double> est = make_rx_estimate(H, s.pilot_beta, snr, noise);
    return combine_with_estimate(est, s.strategy, *cb, emu);
}

} // namespace

void simulate_trial(const Scenario& s, std::int64_t trial, std::span<TrialMetrics> out) {
    if (out.size() != s.snr_db.size())
        throw PreconditionError("output span does not match the SNR grid");
    const auto t = static_cast<std::uint64_t>(trial);

    std::vector<ChannelMatrix<double>> channels;
    channels.reserve(std::size_t(s.K));
    for (int k = 0; k < s.K; ++k) {
        RandomStream rng = RandomStream::derive(s.seed, t, static_cast<std::uint64_t>(k), Purpose::Channel);
        channels.push_back(sample_channel<double>(s.M, s.N, rng));
    }

    const TransmitMode mode = s.csit == Csit::Perfect ? TransmitMode::ZfCsit : TransmitMode::Feedback;
    const bool snr_dependent = !std::isinf(s.pilot_beta);
    std::vector<Effective> eff;
    double cached_bits = -1.0;

    for (std::size_t p = 0; p < s.snr_db.size(); ++p) {
        const double snr = db_to_linear(s.snr_db[p]);
        const double bits = s.csit == Csit::Perfect ? 0.0 : feedback_bits(s, s.snr_db[p]);
        if (eff.empty() || snr_dependent || bits != cached_bits) {
            eff.clear();
            for (int k = 0; k < s.K; ++k)
                eff.push_back(effective_channel(s, channels[std::size_t(k)], trial, k, bits, snr));
            cached_bits = bits;
        }

        const std::span<const Effective> view(eff);
        BeamformerSet<double> bf;
        if (s.scheduler == Scheduler::EqualPower) {
            bf = equal_power_beamformers(view, snr, mode);
        } else {
            std::vector<UserReport<double>> reports;
            reports.reserve(eff.size());
            for (int k = 0; k < s.K; ++k)
                reports.push_back(make_report(k, eff[std::size_t(k)], mode));
            bf = greedy_user_selection(std::span<const UserReport<double>>(reports), snr);
        }
        const std::vector<double> rates = scheduled_rates(view, bf);

        TrialMetrics& m = out[p];
        m.sum_rate = 0.0;
        for (double r : rates)
            m.sum_rate += r;
        m.served = static_cast<int>(rates.size());
        m.per_user_rate = m.served > 0 ? m.sum_rate / m.served : 0.0;
        double err = 0.0;
        for (const Effective& e : eff)
            err += e.direction_error();
        m.direction_error = err / static_cast<double>(eff.size());
    }
}

TrialTable run_trials(const Scenario& s, const RunOptions& opts) {
    validate(s);
    TrialTable table;
    table.trials = s.trials;
    table.points = s.snr_db.size();
    table.rows.resize(static_cast<std::size_t>(s.trials) * table.points);
    parallel_for(s.trials, opts.workers, [&](std::int64_t t) {
        simulate_trial(s, t, std::span<TrialMetrics>(table.rows.data() + std::size_t(t) * table.points, table.points));
    });
    return table;
}

MeanSe mean_se(std::span<const double> x) {
    MeanSe r;
    if (x.empty())
        return r;
    double sum = 0.0;
    for (double v : x)
        sum += v;
    r.mean = sum / static_cast<double>(x.size());
    if (x.size() < 2)
        return r;
    double ss = 0.0;
    for (double v : x)
        ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return r;
}

RateCurve summarize(const Scenario& s, const TrialTable& table) {
    RateCurve curve;
    curve.scenario_hash = scenario_hash(s);
    std::vector<double> sum(static_cast<std::size_t>(table.trials));
    std::vector<double> per_user(sum.size());
    for (std::size_t p = 0; p < table.points; ++p) {
        for (std::int64_t t = 0; t < table.trials; ++t) {
            sum[std::size_t(t)] = table.at(t, p).sum_rate;
            per_user[std::size_t(t)] = table.at(t, p).per_user_rate;
        }
        const MeanSe sr = mean_se(sum);
        curve.points.push_back({s.snr_db[p], sr.mean, mean_se(per_user).mean, sr.se, table.trials});
    }
    return curve;
}

RateCurve run_scenario(const Scenario& s, const RunOptions& opts) {
    return summarize(s, run_trials(s, opts));
}

} // namespace qbc
