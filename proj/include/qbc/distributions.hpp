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

#include <functional>
#include <span>

#include "qbc/random.hpp"

namespace qbc {

// Integer-parameter beta law. For the quantization error of an N-dimensional
// channel subspace in C^M: a = M - N, b = N.
struct BetaParams {
    int a = 1;
    int b = 1;
};

BetaParams subspace_error_params(int M, int N);

// Law of the minimum of 2^bits iid beta(a, b) variables. bits may be any
// nonnegative real; emulated codebooks use fractional sizes.
struct QuantErrorLaw {
    BetaParams beta;
    double bits = 0.0;
};

// Target-gap inputs for the feedback scaling rule. Construct with
// make_scaling_inputs(), which derives and validates c.
struct ScalingInputs {
    int M = 0;
    int N = 0;
    double b_gap = 2.0;
    double snr_db = 0.0;
    double c = 0.0;
};

double log_binomial(int n, int k);
double binomial(int n, int k);

// sum_{l=M-N+1}^{M-1} 1/l (zero for N = 1).
double harmonic_tail(int M, int N);

// F(x) = sum_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^{a+b-1-j}.
double beta_cdf(double x, BetaParams p);
double beta_pdf(double x, BetaParams p);

// x in [0, 1] with beta_cdf(x) = q. Safeguarded Newton on a shrinking
// bracket; stops once the step is below tol relative to x.
double beta_inverse_cdf(double q, BetaParams p, double tol = 1e-12);

// 1 - (1 - F(z))^{2^bits}.
double min_beta_cdf(double z, const QuantErrorLaw& law);

// Z = F^{-1}(1 - (1-U)^{2^-bits}), U ~ uniform(0, 1).
double sample_min_beta(const QuantErrorLaw& law, RandomStream& rng);

// 2^{-B/(M-N)} * C(M-1, N-1)^{-1/(M-N)}.
double expected_error_approx(int M, int N, double bits);

// Sum of k squared magnitudes of iid CN(0, 1) draws; mean k.
double sample_chi2_2k(int k, RandomStream& rng);
double chi2_2k_cdf(double x, int k);

// Per-user rate-loss bound with the approximate expected error plugged in.
double rate_gap_bound(int M, int N, double bits, double snr_linear);
double rate_gap_bound_rx_error(int M, int N, double bits, double snr_linear, double pilot_beta);

ScalingInputs make_scaling_inputs(int M, int N, double b_gap, double snr_db);

// Feedback bits per mobile that hold the per-user gap at log2(b).
double feedback_scaling(const ScalingInputs& s);

// Feedback saved by N-antenna combining relative to single-antenna mobiles.
double feedback_savings(int M, int N, double b_gap, double snr_db);

// Power offset (dB) of block diagonalization with CSIT over ZF with CSIT.
double bd_offset_db(int N);
// Same offset as a sum-rate shift in bps/Hz.
double bd_rate_offset(int M, int N);

// Two-sided Kolmogorov-Smirnov distance between the empirical law of sorted
// samples and cdf.
double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

double db_to_linear(double db);

} // namespace qbc
