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
#include <functional>
#include <span>
#include <vector>

#include "qbc/report.hpp"
#include "qbc/scenario.hpp"

namespace qbc {

struct RunOptions {
    unsigned workers = 0;  // 0: one per hardware thread
};

unsigned resolve_workers(unsigned requested);

// Calls body(i) for every i in [0, count) from a pool of workers pulling
// chunks off a shared counter. Every index is visited even after a failure;
// the exception of the lowest failing index is rethrown.
void parallel_for(std::int64_t count, unsigned workers, const std::function<void(std::int64_t)>& body);

// Outcome of one trial at one SNR point.
struct TrialMetrics {
    double sum_rate = 0.0;
    double per_user_rate = 0.0;
    double direction_error = 0.0;  // mean over the K mobiles
    int served = 0;
};

// Row-major (trial, SNR point) table of per-trial outcomes.
struct TrialTable {
    std::int64_t trials = 0;
    std::size_t points = 0;
    std::vector<TrialMetrics> rows;

    const TrialMetrics& at(std::int64_t trial, std::size_t point) const {
        return rows[static_cast<std::size_t>(trial) * points + point];
    }
};

// One Monte Carlo trial across the whole SNR grid. Every random draw comes
// from streams keyed by (seed, trial, mobile, purpose), never by the SNR
// point, so points of one curve and curves sharing a seed see the same
// channels.
void simulate_trial(const Scenario& s, std::int64_t trial, std::span<TrialMetrics> out);

TrialTable run_trials(const Scenario& s, const RunOptions& opts = {});

RateCurve summarize(const Scenario& s, const TrialTable& table);

RateCurve run_scenario(const Scenario& s, const RunOptions& opts = {});

// Mean and standard error of the mean.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(std::span<const double> x);

} // namespace qbc
