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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "qbc/combining.hpp"
#include "qbc/linalg.hpp"

namespace qbc {

// Direction sets worse conditioned than this cannot be zero-forced.
inline constexpr double kMaxDirectionCondition = 1e10;

enum class Scheduler { EqualPower, GreedyWaterfilling };

std::string_view to_string(Scheduler s);
Scheduler parse_scheduler(std::string_view name);

// Waterfilling over parallel channels with gains g_k under total power P:
// p_k = max(mu - 1/g_k, 0), sum p_k = P.
std::vector<double> waterfilling(std::span<const double> gains, double total_power);

// Unit beamformers for the scheduled users, with their powers.
template <typename Real>
struct BeamformerSet {
    CMatrix<Real> vectors;       // M x K', column k serves users[k]
    std::vector<double> powers;  // sum <= P
    std::vector<int> users;
};

// Zero-forcing beamformers for K' <= M unit directions (columns of dirs):
// normalized columns of dirs (dirs^H dirs)^{-1}, so that dirs_k^H v_j = 0
// for j != k. For K' = M these are the normalized rows of the inverse.
template <typename Real>
CMatrix<Real> zf_beamformers(const CMatrix<Real>& dirs) {
    const Index m = dirs.rows();
    const Index k = dirs.cols();
    if (k < 1 || k > m)
        throw SchedulingError("zero-forcing needs 1 <= K' <= M directions, got " + std::to_string(k));
    const Real cond = condition_number(dirs);
    if (!(cond <= static_cast<Real>(kMaxDirectionCondition)))
        throw SchedulingError("direction set is singular or ill-conditioned");
    const CMatrix<Real> gram = dirs.adjoint() * dirs;
    CMatrix<Real> v = dirs * gram.ldlt().solve(CMatrix<Real>::Identity(k, k));
    v.colwise().normalize();
    return v;
}

// SINR of scheduled stream k at a receiver with effective channel h_eff
// (unit noise).
template <typename Real>
Real sinr(const CVector<Real>& h_eff, Index k, const BeamformerSet<Real>& bf) {
    const RVector<Real> coupling = (bf.vectors.adjoint() * h_eff).cwiseAbs2();
    Real interference = Real(0);
    for (Index j = 0; j < coupling.size(); ++j)
        if (j != k)
            interference += static_cast<Real>(bf.powers[j]) * coupling(j);
    return static_cast<Real>(bf.powers[k]) * coupling(k) / (Real(1) + interference);
}

enum class TransmitMode { Feedback, ZfCsit };

// What the transmitter knows about one mobile.
template <typename Real>
struct UserReport {
    int id = 0;
    CVector<Real> direction;
    Real norm = Real(0);
};

template <typename Real>
UserReport<Real> make_report(int id, const EffectiveChannel<Real>& ch, TransmitMode mode) {
    UserReport<Real> r;
    r.id = id;
    r.norm = std::sqrt(ch.norm2);
    r.direction = mode == TransmitMode::Feedback ? ch.quant.direction : CVector<Real>(ch.h_eff / r.norm);
    return r;
}

// Rates log2(1 + SINR) of each scheduled user, evaluated on true channels.
template <typename Real>
std::vector<double> scheduled_rates(std::span<const EffectiveChannel<Real>> channels, const BeamformerSet<Real>& bf) {
    std::vector<double> rates(bf.users.size());
    for (std::size_t k = 0; k < bf.users.size(); ++k)
        rates[k] = std::log2(1.0 + static_cast<double>(sinr(channels[bf.users[k]].h_eff, Index(k), bf)));
    return rates;
}

// Equal-power ZF to the first M mobiles, directions either fed back or the
// true effective channels. If those directions cannot be zero-forced, users
// are re-added in order and any user that makes the set singular is dropped.
template <typename Real>
BeamformerSet<Real> equal_power_beamformers(std::span<const EffectiveChannel<Real>> channels, double total_power,
                                            TransmitMode mode) {
    if (channels.empty())
        throw PreconditionError("no mobiles to serve");
    const Index m = channels.front().h_eff.size();
    if (static_cast<Index>(channels.size()) < m)
        throw PreconditionError("equal-power round needs K >= M mobiles");
    CMatrix<Real> dirs(m, m);
    for (Index k = 0; k < m; ++k)
        dirs.col(k) = make_report(int(k), channels[k], mode).direction;

    BeamformerSet<Real> bf;
    try {
        bf.vectors = zf_beamformers(dirs);
        bf.users.resize(std::size_t(m));
        std::iota(bf.users.begin(), bf.users.end(), 0);
    } catch (const SchedulingError&) {
        CMatrix<Real> kept(m, 0);
        for (Index k = 0; k < m; ++k) {
            CMatrix<Real> trial(m, kept.cols() + 1);
            trial << kept, dirs.col(k);
            try {
                bf.vectors = zf_beamformers(trial);
            } catch (const SchedulingError&) {
                continue;
            }
            kept = std::move(trial);
            bf.users.push_back(int(k));
        }
    }
    bf.powers.assign(bf.users.size(), total_power / static_cast<double>(bf.users.size()));
    return bf;
}

template <typename Real>
std::vector<double> equal_power_round(std::span<const EffectiveChannel<Real>> channels, double total_power,
                                      TransmitMode mode) {
    return scheduled_rates(channels, equal_power_beamformers(channels, total_power, mode));
}

// Greedy user selection with waterfilling. Users are added one at a time,
// each time taking the candidate that maximizes the estimated sum rate
// sum log2(1 + p_k g_k) with g_k = norm_k^2 |dir_k^H v_k|^2, i.e. assuming
// the reported directions are exact. Stops when no candidate improves the
// estimate or M users are selected.
template <typename Real>
BeamformerSet<Real> greedy_user_selection(std::span<const UserReport<Real>> reports, double total_power) {
    if (reports.empty())
        throw PreconditionError("no mobiles to schedule");
    const Index m = reports.front().direction.size();
    std::vector<int> selected;
    std::vector<char> used(reports.size(), 0);
    double best_rate = 0.0;
    BeamformerSet<Real> best;

    while (static_cast<Index>(selected.size()) < m) {
        int pick = -1;
        double pick_rate = best_rate;
        BeamformerSet<Real> pick_set;
        CMatrix<Real> dirs(m, Index(selected.size()) + 1);
        for (std::size_t i = 0; i < selected.size(); ++i)
            dirs.col(Index(i)) = reports[selected[i]].direction;

        for (std::size_t c = 0; c < reports.size(); ++c) {
            if (used[c])
                continue;
            dirs.col(dirs.cols() - 1) = reports[c].direction;
            CMatrix<Real> v;
            try {
                v = zf_beamformers(dirs);
            } catch (const SchedulingError&) {
                continue;
            }
            std::vector<double> gains(std::size_t(dirs.cols()));
            for (Index k = 0; k < dirs.cols(); ++k) {
                const auto& r = reports[k + 1 < dirs.cols() ? selected[k] : int(c)];
                gains[k] = static_cast<double>(r.norm * r.norm * std::norm(r.direction.dot(v.col(k))));
            }
            std::vector<double> powers = waterfilling(gains, total_power);
            double rate = 0.0;
            for (std::size_t k = 0; k < gains.size(); ++k)
                rate += std::log2(1.0 + powers[k] * gains[k]);
            if (rate > pick_rate) {
                pick = int(c);
                pick_rate = rate;
                pick_set.vectors = std::move(v);
                pick_set.powers = std::move(powers);
            }
        }
        if (pick < 0)
            break;
        used[pick] = 1;
        selected.push_back(pick);
        best_rate = pick_rate;
        best = std::move(pick_set);
        best.users = selected;
    }
    for (int& u : best.users)
        u = reports[u].id;
    return best;
}

// Sum-rate curve of block diagonalization with CSIT, obtained from the ZF
// with CSIT curve by its high-SNR rate offset.
std::vector<double> bd_csit_reference(int M, int N, std::span<const double> zf_csit_sum_rates);

} // namespace qbc
