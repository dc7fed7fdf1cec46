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

// Command-line front end: simulate, verify-lemmas, scaling-table, preset.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbc/analysis.hpp"
#include "qbc/engine.hpp"
#include "qbc/errors.hpp"
#include "qbc/presets.hpp"
#include "qbc/report.hpp"
#include "qbc/scenario.hpp"

namespace {

constexpr int kUsageExit = 64;

int exit_code(const std::string& category) {
    if (category == "invalid_config")
        return 2;
    if (category == "io")
        return 3;
    if (category == "infeasible_gap")
        return 4;
    if (category == "degenerate_channel")
        return 5;
    if (category == "scheduling")
        return 6;
    return 7;
}

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::string out;
    std::string format = "csv";
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed_trials = true) {
    if (with_seed_trials) {
        cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
        cmd->add_option("--trials", c.trials, "Monte Carlo trials (overrides the config)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--workers", c.workers, "Worker threads, 0 for one per core");
    }
    cmd->add_option("--out", c.out, "Output file (directory for presets); stdout if omitted");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

template <typename T>
void deliver(const T& value, const Common& c) {
    const qbc::Format f = qbc::parse_format(c.format);
    if (c.out.empty())
        std::cout << qbc::serialize(value, f);
    else
        qbc::emit(value, f, c.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limited-feedback MIMO downlink simulator with quantization-based combining"};
    app.require_subcommand(1);

    Common sim_opts;
    std::string config;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario and emit its rate curve");
    simulate->add_option("--config", config, "Scenario file (key = value)")->required();
    add_common(simulate, sim_opts);

    Common lemma_opts;
    int lemma_m = 4, lemma_n = 2, lemma_b = 10;
    auto* lemmas = app.add_subcommand("verify-lemmas", "KS checks of the effective-channel laws");
    lemmas->add_option("-M", lemma_m, "Transmit antennas");
    lemmas->add_option("-N", lemma_n, "Receive antennas");
    lemmas->add_option("-B", lemma_b, "Feedback bits (explicit codebook)");
    add_common(lemmas, lemma_opts);

    Common table_opts;
    int table_m = 6;
    std::vector<int> table_n{1, 2, 3};
    double table_b = 2.0;
    std::vector<double> table_snr{0, 5, 10, 15, 20, 25, 30};
    auto* table = app.add_subcommand("scaling-table", "Feedback bits needed for a bounded rate gap");
    table->add_option("-M", table_m, "Transmit antennas");
    table->add_option("-N", table_n, "Receive antenna counts")->delimiter(',');
    table->add_option("--b-gap", table_b, "Per-user gap target log2(b)");
    table->add_option("--snr-db", table_snr, "SNR grid in dB")->delimiter(',');
    add_common(table, table_opts, false);

    Common preset_opts;
    std::string preset_name;
    bool list = false;
    auto* preset = app.add_subcommand("preset", "Run a named figure preset");
    preset->add_option("name", preset_name, "Preset name");
    preset->add_flag("--list", list, "List presets and exit");
    add_common(preset, preset_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << "error[usage]: ";
        app.exit(e);
        return kUsageExit;
    }

    try {
        if (*simulate) {
            qbc::Scenario s = qbc::load_scenario(config);
            if (sim_opts.seed)
                s.seed = *sim_opts.seed;
            if (sim_opts.trials)
                s.trials = *sim_opts.trials;
            qbc::validate(s);
            deliver(qbc::run_scenario(s, {sim_opts.workers}), sim_opts);
        } else if (*lemmas) {
            const qbc::LemmaReport r = qbc::verify_lemmas(lemma_m, lemma_n, lemma_b,
                                                          lemma_opts.trials.value_or(100000),
                                                          lemma_opts.seed.value_or(1), {lemma_opts.workers});
            deliver(r, lemma_opts);
            return r.all_passed() ? 0 : 1;
        } else if (*table) {
            deliver(qbc::scaling_table(table_m, table_n, table_b, table_snr), table_opts);
        } else if (*preset) {
            if (list) {
                for (const auto& name : qbc::preset_names())
                    std::cout << name << "  " << qbc::make_preset(name).description << "\n";
                return 0;
            }
            if (preset_name.empty())
                throw qbc::ConfigError("unknown_preset", "preset name required (see --list)");
            qbc::Preset p = qbc::make_preset(preset_name);
            qbc::override_preset(p, preset_opts.seed, preset_opts.trials);
            const qbc::Format f = qbc::parse_format(preset_opts.format);
            if (preset_opts.out.empty()) {
                for (const auto& o : qbc::run_preset(p, f, {preset_opts.workers}))
                    std::cout << "# " << o.file_name << "\n" << o.contents;
            } else {
                for (const auto& path : qbc::write_preset(p, f, preset_opts.out, {preset_opts.workers}))
                    std::cerr << "wrote " << path.string() << "\n";
            }
        }
    } catch (const qbc::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 8;
    }
    return 0;
}
