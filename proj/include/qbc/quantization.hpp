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
#include <cstdint>
#include <string>

#include "qbc/distributions.hpp"
#include "qbc/linalg.hpp"

namespace qbc {

enum class CodebookMode { Explicit, Emulated };

// Largest explicit codebook (2^22 codewords) we are willing to materialize.
inline constexpr int kMaxExplicitBits = 22;

// Random vector quantization codebook. Explicit codebooks hold 2^B unit
// M-vectors as columns; emulated codebooks hold only (M, B) and are consumed
// by the statistical emulation routines below.
template <typename Real>
class Codebook {
  public:
    static Codebook explicit_rvq(int M, int bits, RandomStream& rng) {
        if (M < 1)
            throw PreconditionError("codebook dimension must be positive");
        if (bits < 0 || bits > kMaxExplicitBits)
            throw PreconditionError("explicit codebook with B=" + std::to_string(bits) +
                                    " bits exceeds the limit of " + std::to_string(kMaxExplicitBits) +
                                    "; use the emulated codebook mode");
        CMatrix<Real> w = random_complex_gaussian<Real>(M, Index(1) << bits, rng);
        w.colwise().normalize();
        return Codebook(CodebookMode::Explicit, bits, M, std::move(w));
    }

    static Codebook emulated(int M, double bits) {
        if (M < 1)
            throw PreconditionError("codebook dimension must be positive");
        if (!(bits >= 0.0))
            throw PreconditionError("codebook bits must be nonnegative");
        return Codebook(CodebookMode::Emulated, bits, M, CMatrix<Real>());
    }

    // Explicit codebook from given unit-norm columns.
    static Codebook from_vectors(CMatrix<Real> w) {
        if (w.cols() == 0 || w.rows() == 0)
            throw PreconditionError("codebook needs at least one vector");
        for (Index j = 0; j < w.cols(); ++j)
            if (std::abs(w.col(j).norm() - Real(1)) > tolerance<Real>(1e-12))
                throw PreconditionError("codebook vector " + std::to_string(j) + " is not unit norm");
        const double bits = std::log2(static_cast<double>(w.cols()));
        const int dim = static_cast<int>(w.rows());
        return Codebook(CodebookMode::Explicit, bits, dim, std::move(w));
    }

    CodebookMode mode() const noexcept { return mode_; }
    bool is_explicit() const noexcept { return mode_ == CodebookMode::Explicit; }
    double bits() const noexcept { return bits_; }
    int dimension() const noexcept { return dim_; }
    Index size() const noexcept { return vectors_.cols(); }

    const CMatrix<Real>& vectors() const {
        if (!is_explicit())
            throw PreconditionError("emulated codebooks store no vectors");
        return vectors_;
    }

  private:
    Codebook(CodebookMode mode, double bits, int dim, CMatrix<Real> w)
        : mode_(mode), bits_(bits), dim_(dim), vectors_(std::move(w)) {}

    CodebookMode mode_;
    double bits_;
    int dim_;
    CMatrix<Real> vectors_;
};

template <typename Real = double>
Codebook<Real> generate_rvq(int M, int bits, RandomStream& rng) {
    return Codebook<Real>::explicit_rvq(M, bits, rng);
}

// Index of the chosen codeword (-1 for emulated quantization), the codeword
// itself, and sin^2 of the angle to the quantized object.
template <typename Real>
struct QuantizationResult {
    std::int64_t index = -1;
    CVector<Real> direction;
    Real sin2_error = Real(0);
};

namespace detail {

template <typename Real>
void require_explicit(const Codebook<Real>& cb, Index dim) {
    if (!cb.is_explicit())
        throw PreconditionError("operation needs an explicit codebook");
    if (cb.dimension() != dim)
        throw PreconditionError("codebook dimension " + std::to_string(cb.dimension()) +
                                " does not match channel dimension " + std::to_string(dim));
}

} // namespace detail

// Codeword with the smallest angle to h; ties go to the lowest index.
template <typename Real>
QuantizationResult<Real> quantize_vector(const CVector<Real>& h, const Codebook<Real>& cb) {
    detail::require_explicit(cb, h.size());
    const Real norm2 = h.squaredNorm();
    if (!(norm2 > Real(0)))
        throw PreconditionError("cannot quantize a zero vector");
    const RVector<Real> gains = (cb.vectors().adjoint() * h).cwiseAbs2();
    Index best = 0;
    gains.maxCoeff(&best);
    const Real cos2 = std::min(Real(1), gains(best) / norm2);
    return {best, cb.vectors().col(best), Real(1) - cos2};
}

// Codeword closest to the subspace col(Q): argmax ||Q^H w||^2.
template <typename Real>
QuantizationResult<Real> quantize_subspace(const CMatrix<Real>& Q, const Codebook<Real>& cb) {
    detail::require_explicit(cb, Q.rows());
    const RVector<Real> cos2 = (Q.adjoint() * cb.vectors()).colwise().squaredNorm().transpose();
    Index best = 0;
    cos2.maxCoeff(&best);
    return {best, cb.vectors().col(best), Real(1) - std::min(Real(1), cos2(best))};
}

// Isotropic unit vector in col(basis). The phase is left random: fixing it
// would bias the relative phase of any vector later built from two draws.
template <typename Real>
CVector<Real> isotropic_in_subspace(const CMatrix<Real>& basis, RandomStream& rng) {
    if (basis.cols() < 1)
        throw PreconditionError("subspace dimension must be at least 1");
    CVector<Real> g = random_complex_gaussian<Real>(basis.cols(), rng);
    CVector<Real> out = basis * g;
    out.normalize();
    return out;
}

// Draws the outcome of quantizing the subspace col(basis) with a fresh RVQ
// codebook of 2^bits * multiplicity codewords, without building it:
// direction = sqrt(1-Z) u + sqrt(Z) s with u isotropic in the subspace and s
// isotropic in its complement. Returns u alongside, since it equals the
// normalized projection of the codeword onto the subspace.
template <typename Real>
struct EmulatedQuantization {
    QuantizationResult<Real> result;
    CVector<Real> in_span;
};

template <typename Real>
EmulatedQuantization<Real> emulate_quantization(const CMatrix<Real>& basis, const CMatrix<Real>& complement,
                                                double bits, RandomStream& rng, double multiplicity = 1.0) {
    const int M = static_cast<int>(basis.rows());
    const int N = static_cast<int>(basis.cols());
    if (complement.cols() != M - N)
        throw PreconditionError("complement basis has the wrong dimension");
    const QuantErrorLaw law{subspace_error_params(M, N), bits + std::log2(multiplicity)};
    const Real z = static_cast<Real>(sample_min_beta(law, rng));
    CVector<Real> u = isotropic_in_subspace(basis, rng);
    const CVector<Real> s = isotropic_in_subspace(complement, rng);
    CVector<Real> direction = std::sqrt(Real(1) - z) * u + std::sqrt(z) * s;
    return {{-1, std::move(direction), z}, std::move(u)};
}

template <typename Real>
QuantizationResult<Real> emulate_subspace_quantization(const ChannelMatrix<Real>& channel, double bits,
                                                       RandomStream& rng) {
    return emulate_quantization(channel.basis(), channel.complement(), bits, rng).result;
}

} // namespace qbc
