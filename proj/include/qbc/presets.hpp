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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbc/engine.hpp"
#include "qbc/report.hpp"
#include "qbc/scenario.hpp"

namespace qbc {

enum class JobKind {
    Rate,         // run_scenario on the job's scenario
    ErrorSweep,   // run_error_sweep over sweep_bits
    BdReference,  // analytic BD-CSIT curve shifted from another job's curve
};

struct PresetJob {
    std::string label;
    JobKind kind = JobKind::Rate;
    Scenario scenario;
    std::vector<double> sweep_bits;
    std::string reference;  // BdReference: label of the ZF-CSIT job
    int bd_antennas = 0;    // BdReference: N
};

struct Preset {
    std::string name;
    std::string description;
    std::vector<PresetJob> jobs;
};

// fig3 ... fig8 plus combining_scaled.
std::vector<std::string> preset_names();

// Throws ConfigError (rule unknown_preset) for unknown names.
Preset make_preset(std::string_view name);

void override_preset(Preset& p, std::optional<std::uint64_t> seed, std::optional<std::int64_t> trials);

// One serialized output per job, named <preset>_<label>.<csv|json>.
struct PresetOutput {
    std::string file_name;
    std::string contents;
};

std::vector<PresetOutput> run_preset(const Preset& p, Format f, const RunOptions& opts = {});

// Runs the preset and writes every output under dir. Returns the paths.
std::vector<std::filesystem::path> write_preset(const Preset& p, Format f, const std::filesystem::path& dir,
                                                const RunOptions& opts = {});

} // namespace qbc
