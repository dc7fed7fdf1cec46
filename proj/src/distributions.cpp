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

#include "qbc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qbc/errors.hpp"

namespace qbc {

namespace {

void check_params(BetaParams p) {
    if (p.a < 1 || p.b < 1)
        throw PreconditionError("beta parameters must be positive integers, got (" + std::to_string(p.a) +
                                ", " + std::to_string(p.b) + ")");
}

void check_antennas(int M, int N) {
    if (N < 1 || N >= M)
        throw PreconditionError("need 1 <= N < M, got M=" + std::to_string(M) + ", N=" + std::to_string(N));
}

} // namespace

BetaParams subspace_error_params(int M, int N) {
    check_antennas(M, N);
    return {M - N, N};
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n)
        return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) { return std::round(std::exp(log_binomial(n, k))); }

double harmonic_tail(int M, int N) {
    double sum = 0.0;
    for (int l = M - N + 1; l <= M - 1; ++l)
        sum += 1.0 / l;
    return sum;
}

double beta_cdf(double x, BetaParams p) {
    check_params(p);
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const int n = p.a + p.b - 1;
    const double lx = std::log(x);
    const double l1x = std::log1p(-x);
    double sum = 0.0;
    for (int j = p.a; j <= n; ++j)
        sum += std::exp(log_binomial(n, j) + j * lx + (n - j) * l1x);
    return std::min(1.0, sum);
}

double beta_pdf(double x, BetaParams p) {
    check_params(p);
    if (x < 0.0 || x > 1.0)
        return 0.0;
    // 1/B(a,b) = (a+b-1)! / ((a-1)! (b-1)!) = (a+b-1) C(a+b-2, a-1)
    const double log_norm = std::log(p.a + p.b - 1.0) + log_binomial(p.a + p.b - 2, p.a - 1);
    double log_body = 0.0;
    if (p.a > 1)
        log_body += (p.a - 1) * std::log(x);
    if (p.b > 1)
        log_body += (p.b - 1) * std::log1p(-x);
    return std::exp(log_norm + log_body);
}

double beta_inverse_cdf(double q, BetaParams p, double tol) {
    check_params(p);
    if (q <= 0.0)
        return 0.0;
    if (q >= 1.0)
        return 1.0;

    // Leading-order small-x inversion as a starting point.
    const int n = p.a + p.b - 1;
    double x = std::exp((std::log(q) - log_binomial(n, p.a)) / p.a);
    if (!(x > 0.0 && x < 1.0))
        x = 0.5;

    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = beta_cdf(x, p) - q;
        if (f == 0.0)
            return x;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        if (hi - lo <= tol * hi)
            return 0.5 * (lo + hi);

        const double density = beta_pdf(x, p);
        double next = density > 0.0 ? x - f / density : lo - 1.0;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= tol * next)
            return next;
        x = next;
    }
    return x;
}

double min_beta_cdf(double z, const QuantErrorLaw& law) {
    const double f = beta_cdf(z, law.beta);
    if (f >= 1.0)
        return 1.0;
    return -std::expm1(std::exp2(law.bits) * std::log1p(-f));
}

double sample_min_beta(const QuantErrorLaw& law, RandomStream& rng) {
    if (law.bits < 0.0)
        throw PreconditionError("codebook size exponent must be nonnegative");
    const double u = rng.uniform();
    const double q = -std::expm1(std::exp2(-law.bits) * std::log1p(-u));
    return beta_inverse_cdf(q, law.beta);
}

double expected_error_approx(int M, int N, double bits) {
    check_antennas(M, N);
    const double span = M - N;
    return std::exp2(-bits / span) * std::exp(-log_binomial(M - 1, N - 1) / span);
}

double sample_chi2_2k(int k, RandomStream& rng) {
    if (k < 1)
        throw PreconditionError("chi-square degrees need k >= 1");
    double sum = 0.0;
    for (int i = 0; i < k; ++i)
        sum += std::norm(rng.complex_normal<double>());
    return sum;
}

double chi2_2k_cdf(double x, int k) {
    // Gamma(k, 1) lower regularized incomplete gamma P(k, x).
    if (k < 1)
        throw PreconditionError("chi-square degrees need k >= 1");
    if (x <= 0.0)
        return 0.0;
    if (x < k + 1.0) {
        // Lower tail: e^{-x} x^k / k! * sum_j x^j / ((k+1)...(k+j)).
        double term = 1.0;
        double sum = 1.0;
        for (int j = 1; j < 1000 && term > sum * 1e-17; ++j) {
            term *= x / (k + j);
            sum += term;
        }
        return std::min(1.0, std::exp(k * std::log(x) - x - std::lgamma(k + 1.0)) * sum);
    }
    // Upper tail: 1 - e^{-x} sum_{i<k} x^i / i!
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < k; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::max(0.0, 1.0 - std::exp(-x) * sum);
}

double rate_gap_bound(int M, int N, double bits, double snr_linear) {
    return rate_gap_bound_rx_error(M, N, bits, snr_linear, std::numeric_limits<double>::infinity());
}

double rate_gap_bound_rx_error(int M, int N, double bits, double snr_linear, double pilot_beta) {
    check_antennas(M, N);
    if (!(snr_linear > 0.0))
        throw PreconditionError("SNR must be positive");
    if (!(pilot_beta >= 1.0))
        throw PreconditionError("pilot factor must be >= 1");
    const double norm_loss = harmonic_tail(M, N) * std::numbers::log2e;
    const double interference =
        snr_linear * (M - N + 1.0) / M * expected_error_approx(M, N, bits) + 1.0 / pilot_beta;
    return norm_loss + std::log2(1.0 + interference);
}

ScalingInputs make_scaling_inputs(int M, int N, double b_gap, double snr_db) {
    check_antennas(M, N);
    if (!(b_gap > 1.0))
        throw InfeasibleGapError("target gap argument b must exceed 1");
    const double c = b_gap * std::exp(-harmonic_tail(M, N)) - 1.0;
    if (!(c > 0.0))
        throw InfeasibleGapError("b=" + std::to_string(b_gap) + " cannot absorb the norm loss for M=" +
                                 std::to_string(M) + ", N=" + std::to_string(N) + " (c <= 0)");
    return {M, N, b_gap, snr_db, c};
}

double feedback_scaling(const ScalingInputs& s) {
    check_antennas(s.M, s.N);
    if (!(s.c > 0.0))
        throw InfeasibleGapError("scaling constant c must be positive");
    const double span = s.M - s.N;
    const double log2_snr = s.snr_db / 10.0 * std::numbers::ln10 * std::numbers::log2e;
    return span * log2_snr - span * std::log2(s.c) - span * std::log2(s.M / (s.M - s.N + 1.0)) -
           log_binomial(s.M - 1, s.N - 1) * std::numbers::log2e;
}

double feedback_savings(int M, int N, double b_gap, double snr_db) {
    return feedback_scaling(make_scaling_inputs(M, 1, b_gap, snr_db)) -
           feedback_scaling(make_scaling_inputs(M, N, b_gap, snr_db));
}

double bd_offset_db(int N) {
    if (N < 1)
        throw PreconditionError("N must be positive");
    double sum = 0.0;
    for (int j = 1; j <= N - 1; ++j)
        sum += static_cast<double>(N - j) / j;
    return 3.0 * std::numbers::log2e / N * sum;
}

double bd_rate_offset(int M, int N) {
    if (N < 1 || M % N != 0)
        throw PreconditionError("block diagonalization needs N to divide M");
    return bd_offset_db(N) * M / 3.0;
}

double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
    const auto n = static_cast<double>(sorted_samples.size());
    if (sorted_samples.empty())
        throw PreconditionError("KS statistic needs at least one sample");
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = cdf(sorted_samples[i]);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return d;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace qbc
