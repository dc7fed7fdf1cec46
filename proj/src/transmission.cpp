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

#include "qbc/transmission.hpp"

#include <string>

#include "qbc/distributions.hpp"

namespace qbc {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Qbc:
        return "qbc";
    case Strategy::AntennaSelection:
        return "antenna_selection";
    case Strategy::Mrc:
        return "mrc";
    case Strategy::MaxEigenvector:
        return "max_eigenvector";
    case Strategy::None:
        return "none";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (Strategy s : {Strategy::Qbc, Strategy::AntennaSelection, Strategy::Mrc, Strategy::MaxEigenvector,
                       Strategy::None})
        if (name == to_string(s))
            return s;
    throw ConfigError("bad_value", "unknown strategy '" + std::string(name) +
                      "' (expected qbc | antenna_selection | mrc | max_eigenvector | none)");
}

std::string_view to_string(Scheduler s) {
    return s == Scheduler::EqualPower ? "none_equal_power" : "greedy_waterfilling";
}

Scheduler parse_scheduler(std::string_view name) {
    if (name == "none_equal_power")
        return Scheduler::EqualPower;
    if (name == "greedy_waterfilling")
        return Scheduler::GreedyWaterfilling;
    throw ConfigError("bad_value", "unknown scheduler '" + std::string(name) +
                      "' (expected none_equal_power | greedy_waterfilling)");
}

std::vector<double> waterfilling(std::span<const double> gains, double total_power) {
    if (gains.empty())
        throw PreconditionError("waterfilling needs at least one channel");
    if (!(total_power >= 0.0))
        throw PreconditionError("total power must be nonnegative");
    for (double g : gains)
        if (!(g > 0.0))
            throw PreconditionError("waterfilling gains must be positive");

    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

    // Largest active set whose weakest member still gets positive power.
    double inverse_sum = 0.0;
    double level = 0.0;
    for (std::size_t m = 1; m <= order.size(); ++m) {
        inverse_sum += 1.0 / gains[order[m - 1]];
        const double candidate = (total_power + inverse_sum) / static_cast<double>(m);
        if (m > 1 && candidate - 1.0 / gains[order[m - 1]] <= 0.0)
            break;
        level = candidate;
    }

    std::vector<double> powers(gains.size());
    for (std::size_t k = 0; k < gains.size(); ++k)
        powers[k] = std::max(0.0, level - 1.0 / gains[k]);
    return powers;
}

std::vector<double> bd_csit_reference(int M, int N, std::span<const double> zf_csit_sum_rates) {
    const double offset = bd_rate_offset(M, N);
    std::vector<double> out(zf_csit_sum_rates.begin(), zf_csit_sum_rates.end());
    for (double& r : out)
        r += offset;
    return out;
}

} // namespace qbc
