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

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "qbc/linalg.hpp"
#include "qbc/quantization.hpp"

namespace qbc {

enum class Strategy { Qbc, AntennaSelection, Mrc, MaxEigenvector, None };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// Result of receive combining at one mobile: the effective single-antenna
// channel h_eff = H gamma and the codeword fed back for it.
template <typename Real>
struct EffectiveChannel {
    CVector<Real> h_eff;
    CVector<Real> gamma;
    QuantizationResult<Real> quant;
    Real norm2 = Real(0);
    Strategy strategy = Strategy::None;

    // sin^2 of the angle between the fed-back codeword and h_eff.
    Real direction_error() const {
        const Real cos2 = std::norm(quant.direction.dot(h_eff)) / norm2;
        return Real(1) - std::min(Real(1), cos2);
    }
};

// Combiner weights and feedback chosen from what the mobile observes. The
// effective channel is realized separately against the true channel so that
// decisions made on an estimate can be evaluated on the real thing.
template <typename Real>
struct CombinerChoice {
    CVector<Real> gamma;
    QuantizationResult<Real> quant;
    Strategy strategy;
};

template <typename Real>
EffectiveChannel<Real> realize(const CMatrix<Real>& true_h, CombinerChoice<Real> choice) {
    EffectiveChannel<Real> out;
    out.h_eff = true_h * choice.gamma;
    out.gamma = std::move(choice.gamma);
    out.quant = std::move(choice.quant);
    out.norm2 = out.h_eff.squaredNorm();
    out.strategy = choice.strategy;
    return out;
}

namespace detail {

template <typename Real>
CVector<Real> unit_gamma(CVector<Real> u) {
    u.normalize();
    fix_phase(u);
    return u;
}

template <typename Real>
CVector<Real> basis_vector(Index n, Index j) {
    CVector<Real> e = CVector<Real>::Zero(n);
    e(j) = Real(1);
    return e;
}

// Vector quantization of a single direction, explicit or emulated.
template <typename Real>
QuantizationResult<Real> quantize_direction(const CVector<Real>& h, const Codebook<Real>& cb, RandomStream& rng,
                                            double multiplicity = 1.0) {
    if (cb.is_explicit())
        return quantize_vector(h, cb);
    const CMatrix<Real> line = h.normalized();
    return emulate_quantization<Real>(line, complement_basis<Real>(line), cb.bits(), rng, multiplicity).result;
}

} // namespace detail

// Quantization-based combining: feed back the codeword closest to span(H)
// and steer the effective channel onto that codeword's projection.
template <typename Real>
CombinerChoice<Real> choose_qbc(const ChannelMatrix<Real>& channel, const Codebook<Real>& cb, RandomStream& rng) {
    QuantizationResult<Real> quant;
    CVector<Real> s_proj;
    if (cb.is_explicit()) {
        quant = quantize_subspace(channel.basis(), cb);
        const SpanProjection<Real> proj = project_onto_span(quant.direction, channel.basis());
        const Real norm = proj.projection.norm();
        if (!(norm > tolerance<Real>(1e-12)))
            throw DegenerateChannelError("chosen codeword is orthogonal to the channel span");
        s_proj = proj.projection / norm;
    } else {
        auto emulated = emulate_quantization(channel.basis(), channel.complement(), cb.bits(), rng);
        quant = std::move(emulated.result);
        s_proj = std::move(emulated.in_span);
    }
    CVector<Real> gamma = detail::unit_gamma(channel.solve_in_span(s_proj));
    return {std::move(gamma), std::move(quant), Strategy::Qbc};
}

// Per-antenna quantization; keep the antenna with the smallest error.
template <typename Real>
CombinerChoice<Real> choose_antenna_selection(const ChannelMatrix<Real>& channel, const Codebook<Real>& cb,
                                              RandomStream& rng) {
    const CMatrix<Real>& H = channel.matrix();
    const Index n = H.cols();
    if (!cb.is_explicit()) {
        // The best of N independent quantizations is one quantization with
        // N times the codewords, on an antenna independent of the norms.
        const Index j = std::min<Index>(n - 1, static_cast<Index>(rng.uniform() * n));
        auto quant = detail::quantize_direction<Real>(H.col(j), cb, rng, static_cast<double>(n));
        return {detail::basis_vector<Real>(n, j), std::move(quant), Strategy::AntennaSelection};
    }
    detail::require_explicit(cb, H.rows());
    const RMatrix<Real> gains = (cb.vectors().adjoint() * H).cwiseAbs2();
    Index best_antenna = 0;
    Index best_word = 0;
    Real best_error = Real(2);
    for (Index j = 0; j < n; ++j) {
        Index word = 0;
        const Real cos2 = gains.col(j).maxCoeff(&word) / H.col(j).squaredNorm();
        const Real error = Real(1) - std::min(Real(1), cos2);
        if (error < best_error) {
            best_error = error;
            best_antenna = j;
            best_word = word;
        }
    }
    QuantizationResult<Real> quant{best_word, cb.vectors().col(best_word), best_error};
    return {detail::basis_vector<Real>(n, best_antenna), std::move(quant), Strategy::AntennaSelection};
}

// Codeword maximizing received power ||H^H w||^2 with matched combiner.
template <typename Real>
CombinerChoice<Real> choose_mrc(const ChannelMatrix<Real>& channel, const Codebook<Real>& cb) {
    const CMatrix<Real>& H = channel.matrix();
    if (!cb.is_explicit())
        throw PreconditionError("MRC needs an explicit codebook: its error law has no closed form");
    detail::require_explicit(cb, H.rows());
    const RVector<Real> power = (H.adjoint() * cb.vectors()).colwise().squaredNorm().transpose();
    Index best = 0;
    power.maxCoeff(&best);
    const CVector<Real> w = cb.vectors().col(best);
    CVector<Real> gamma = detail::unit_gamma<Real>(H.adjoint() * w);
    const CVector<Real> h_eff = H * gamma;
    const Real cos2 = std::norm(w.dot(h_eff)) / h_eff.squaredNorm();
    QuantizationResult<Real> quant{best, w, Real(1) - std::min(Real(1), cos2)};
    return {std::move(gamma), std::move(quant), Strategy::Mrc};
}

// Steer onto the dominant eigenmode, then vector-quantize it.
template <typename Real>
CombinerChoice<Real> choose_max_eigenvector(const ChannelMatrix<Real>& channel, const Codebook<Real>& cb,
                                            RandomStream& rng) {
    const CMatrix<Real>& H = channel.matrix();
    const CMatrix<Real> gram = H.adjoint() * H;
    EigenPair<Real> top = max_eigvec<Real>(gram);
    auto quant = detail::quantize_direction<Real>(H * top.vector, cb, rng);
    return {std::move(top.vector), std::move(quant), Strategy::MaxEigenvector};
}

// No combining: receive on the first antenna only.
template <typename Real>
CombinerChoice<Real> choose_none(const ChannelMatrix<Real>& channel, const Codebook<Real>& cb, RandomStream& rng) {
    const CMatrix<Real>& H = channel.matrix();
    auto quant = detail::quantize_direction<Real>(H.col(0), cb, rng);
    return {detail::basis_vector<Real>(H.cols(), 0), std::move(quant), Strategy::None};
}

template <typename Real>
CombinerChoice<Real> choose(Strategy strategy, const ChannelMatrix<Real>& channel, const Codebook<Real>& cb,
                            RandomStream& rng) {
    switch (strategy) {
    case Strategy::Qbc:
        return choose_qbc(channel, cb, rng);
    case Strategy::AntennaSelection:
        return choose_antenna_selection(channel, cb, rng);
    case Strategy::Mrc:
        return choose_mrc(channel, cb);
    case Strategy::MaxEigenvector:
        return choose_max_eigenvector(channel, cb, rng);
    case Strategy::None:
        return choose_none(channel, cb, rng);
    }
    throw PreconditionError("unknown combining strategy");
}

template <typename Real>
EffectiveChannel<Real> qbc(const ChannelMatrix<Real>& H, const Codebook<Real>& cb, RandomStream& rng) {
    return realize(H.matrix(), choose_qbc(H, cb, rng));
}

template <typename Real>
EffectiveChannel<Real> antenna_selection(const ChannelMatrix<Real>& H, const Codebook<Real>& cb,
                                         RandomStream& rng) {
    return realize(H.matrix(), choose_antenna_selection(H, cb, rng));
}

template <typename Real>
EffectiveChannel<Real> mrc(const ChannelMatrix<Real>& H, const Codebook<Real>& cb) {
    return realize(H.matrix(), choose_mrc(H, cb));
}

template <typename Real>
EffectiveChannel<Real> max_eig_combining(const ChannelMatrix<Real>& H, const Codebook<Real>& cb,
                                         RandomStream& rng) {
    return realize(H.matrix(), choose_max_eigenvector(H, cb, rng));
}

template <typename Real>
EffectiveChannel<Real> no_combining(const ChannelMatrix<Real>& H, const Codebook<Real>& cb, RandomStream& rng) {
    return realize(H.matrix(), choose_none(H, cb, rng));
}

template <typename Real>
EffectiveChannel<Real> combine(Strategy strategy, const ChannelMatrix<Real>& H, const Codebook<Real>& cb,
                               RandomStream& rng) {
    return realize(H.matrix(), choose(strategy, H, cb, rng));
}

// MMSE channel estimate from beta*M shared pilots at SNR P:
// G = sqrt(beta P) H + noise, G_hat = sqrt(beta P) / (1 + beta P) G.
template <typename Real>
struct RxEstimate {
    CMatrix<Real> g_hat;
    double pilot_beta;
    double snr;
    CMatrix<Real> true_h;
};

template <typename Real>
RxEstimate<Real> make_rx_estimate(const ChannelMatrix<Real>& H, double pilot_beta, double snr_linear,
                                  RandomStream& rng) {
    if (!(pilot_beta >= 1.0))
        throw PreconditionError("pilot factor must be >= 1");
    if (!(snr_linear > 0.0))
        throw PreconditionError("SNR must be positive");
    const CMatrix<Real>& h = H.matrix();
    const CMatrix<Real> noise = random_complex_gaussian<Real>(h.rows(), h.cols(), rng);
    if (std::isinf(pilot_beta))
        return {h, pilot_beta, snr_linear, h};
    const double gain = std::sqrt(pilot_beta * snr_linear);
    const CMatrix<Real> observed = static_cast<Real>(gain) * h + noise;
    const Real shrink = static_cast<Real>(gain / (1.0 + pilot_beta * snr_linear));
    return {shrink * observed, pilot_beta, snr_linear, h};
}

// Combining decided on the estimate, evaluated on the true channel.
template <typename Real>
EffectiveChannel<Real> combine_with_estimate(const RxEstimate<Real>& est, Strategy strategy,
                                             const Codebook<Real>& cb, RandomStream& rng) {
    const ChannelMatrix<Real> observed(est.g_hat);
    return realize(est.true_h, choose(strategy, observed, cb, rng));
}

} // namespace qbc
