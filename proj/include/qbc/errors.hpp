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

#include <stdexcept>
#include <string>

namespace qbc {

// Base of every error raised by the library. category() is a stable,
// machine-readable tag that the CLI reports on failure.
class Error : public std::runtime_error {
  public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

  private:
    std::string category_;
};

// Rank-deficient or ill-conditioned channel / Gram matrix.
class DegenerateChannelError : public Error {
  public:
    explicit DegenerateChannelError(const std::string& what) : Error("degenerate_channel", what) {}
};

class PreconditionError : public Error {
  public:
    explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

// Quantized direction set that cannot be zero-forced.
class SchedulingError : public Error {
  public:
    explicit SchedulingError(const std::string& what) : Error("scheduling", what) {}
};

// Target rate gap too small for the norm-loss term (c <= 0).
class InfeasibleGapError : public Error {
  public:
    explicit InfeasibleGapError(const std::string& what) : Error("infeasible_gap", what) {}
};

// Scenario validation failure. rule() names the violated invariant.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : ConfigError("syntax", what) {}
    ConfigError(std::string rule, const std::string& what)
        : Error("invalid_config", rule + ": " + what), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

  private:
    std::string rule_;
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

} // namespace qbc
