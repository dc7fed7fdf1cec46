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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "qbc/errors.hpp"
#include "qbc/random.hpp"

namespace qbc {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Condition numbers above this are treated as rank deficiency.
inline constexpr double kMaxConditionNumber = 1e12;

// Absolute tolerance usable at precision Real: the requested value, floored
// at a small multiple of machine epsilon so float instantiations stay sane.
template <typename Real>
constexpr Real tolerance(double requested) {
    return std::max(static_cast<Real>(requested), Real(64) * std::numeric_limits<Real>::epsilon());
}

// Rotates v so that its largest-magnitude entry (lowest index on ties) is
// real and nonnegative. Zero vectors are left untouched.
template <typename Derived>
void fix_phase(Eigen::MatrixBase<Derived>& v) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    Index pivot = 0;
    Real best = Real(0);
    for (Index i = 0; i < v.size(); ++i) {
        const Real mag = std::abs(v(i));
        if (mag > best) {
            best = mag;
            pivot = i;
        }
    }
    if (best == Real(0))
        return;
    const auto rotation = std::conj(v(pivot)) / best;
    v *= rotation;
    v(pivot) = typename Derived::Scalar(std::abs(v(pivot)), Real(0));
}

template <typename Derived>
auto phase_fixed(const Eigen::MatrixBase<Derived>& v) {
    typename Derived::PlainObject out = v;
    fix_phase(out);
    return out;
}

// Ratio of extreme singular values; +inf for rank-deficient input.
template <typename Derived>
auto condition_number(const Eigen::MatrixBase<Derived>& A) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= Real(0))
        return std::numeric_limits<Real>::infinity();
    return sv(0) / sv(sv.size() - 1);
}

template <typename Real>
CVector<Real> random_complex_gaussian(Index n, RandomStream& rng) {
    CVector<Real> g(n);
    for (Index i = 0; i < n; ++i)
        g(i) = rng.complex_normal<Real>();
    return g;
}

template <typename Real>
CMatrix<Real> random_complex_gaussian(Index rows, Index cols, RandomStream& rng) {
    CMatrix<Real> g(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            g(i, j) = rng.complex_normal<Real>();
    return g;
}

// Full unitary factor of a Householder QR: the first cols(H) columns span
// col(H), the rest span its orthogonal complement.
template <typename Real>
struct Orthogonalization {
    CMatrix<Real> q;  // M x M unitary
    CMatrix<Real> r;  // N x N upper triangular
};

template <typename Real>
Orthogonalization<Real> householder_orthogonalize(const CMatrix<Real>& H) {
    const Index m = H.rows();
    const Index n = H.cols();
    if (n == 0 || n > m)
        throw PreconditionError("orthogonalization needs 1 <= cols <= rows, got " + std::to_string(m) +
                                "x" + std::to_string(n));
    Eigen::HouseholderQR<CMatrix<Real>> qr(H);
    Orthogonalization<Real> out;
    out.q = qr.householderQ() * CMatrix<Real>::Identity(m, m);
    out.r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
    const Real cond = condition_number(out.r);
    if (!(cond <= static_cast<Real>(kMaxConditionNumber)))
        throw DegenerateChannelError("channel matrix is rank deficient (condition number " +
                                     std::to_string(static_cast<double>(cond)) + ")");
    return out;
}

// Orthonormal basis of col(H) (M x N), via Householder QR.
template <typename Real>
CMatrix<Real> orthonormal_basis(const CMatrix<Real>& H) {
    return householder_orthogonalize(H).q.leftCols(H.cols());
}

// Basis of the orthogonal complement of col(basis) (M x (M-N)).
template <typename Real>
CMatrix<Real> complement_basis(const CMatrix<Real>& basis) {
    const auto ortho = householder_orthogonalize(basis);
    return ortho.q.rightCols(basis.rows() - basis.cols());
}

// One mobile's M x N channel together with its cached orthonormal basis Q,
// complement basis and triangular factor. Immutable after construction.
template <typename Real>
class ChannelMatrix {
  public:
    explicit ChannelMatrix(CMatrix<Real> H) : h_(std::move(H)) {
        if (h_.cols() >= h_.rows())
            throw PreconditionError("channel needs N < M, got M=" + std::to_string(h_.rows()) +
                                    ", N=" + std::to_string(h_.cols()));
        auto ortho = householder_orthogonalize(h_);
        basis_ = ortho.q.leftCols(h_.cols());
        complement_ = ortho.q.rightCols(h_.rows() - h_.cols());
        r_ = std::move(ortho.r);
    }

    const CMatrix<Real>& matrix() const noexcept { return h_; }
    const CMatrix<Real>& basis() const noexcept { return basis_; }
    const CMatrix<Real>& complement() const noexcept { return complement_; }
    Index tx_antennas() const noexcept { return h_.rows(); }
    Index rx_antennas() const noexcept { return h_.cols(); }

    // Coefficients u with H u = s for s in col(H).
    CVector<Real> solve_in_span(const CVector<Real>& s) const {
        const CVector<Real> coords = basis_.adjoint() * s;
        const Real residual = (s - basis_ * coords).norm();
        if (residual > tolerance<Real>(1e-8) * std::max(Real(1), s.norm()))
            throw PreconditionError("vector is not in the channel span (residual " +
                                    std::to_string(static_cast<double>(residual)) + ")");
        return r_.template triangularView<Eigen::Upper>().solve(coords);
    }

  private:
    CMatrix<Real> h_;
    CMatrix<Real> basis_;
    CMatrix<Real> complement_;
    CMatrix<Real> r_;
};

// Draws H with iid CN(0,1) entries (unit variance, split evenly between the
// real and imaginary parts).
template <typename Real = double>
ChannelMatrix<Real> sample_channel(int M, int N, RandomStream& rng) {
    if (N < 1 || N >= M)
        throw PreconditionError("sample_channel needs 1 <= N < M, got M=" + std::to_string(M) +
                                ", N=" + std::to_string(N));
    return ChannelMatrix<Real>(random_complex_gaussian<Real>(M, N, rng));
}

template <typename Real>
struct SpanProjection {
    CVector<Real> projection;
    Real cos2;
    Real sin2;
};

// Projects unit w onto col(Q); cos2 = ||Q^H w||^2, sin2 = 1 - cos2.
template <typename Real>
SpanProjection<Real> project_onto_span(const CVector<Real>& w, const CMatrix<Real>& Q) {
    const CVector<Real> coords = Q.adjoint() * w;
    const Real cos2 = std::min(Real(1), coords.squaredNorm());
    return {Q * coords, cos2, Real(1) - cos2};
}

// u = (H^H H)^{-1} H^H s for s in col(H).
template <typename Real>
CVector<Real> pseudo_inverse_apply(const CMatrix<Real>& H, const CVector<Real>& s) {
    const auto ortho = householder_orthogonalize(H);
    const CMatrix<Real> basis = ortho.q.leftCols(H.cols());
    const CVector<Real> coords = basis.adjoint() * s;
    const Real residual = (s - basis * coords).norm();
    if (residual > tolerance<Real>(1e-8) * std::max(Real(1), s.norm()))
        throw PreconditionError("vector is not in the column span (residual " +
                                std::to_string(static_cast<double>(residual)) + ")");
    return ortho.r.template triangularView<Eigen::Upper>().solve(coords);
}

template <typename Real>
struct EigenPair {
    Real value;
    CVector<Real> vector;
};

// Largest eigenvalue of a Hermitian PSD matrix and a unit eigenvector.
// Degenerate top eigenvalues resolve to the projection of the lowest-index
// standard basis vector onto the top eigenspace, so the result does not
// depend on the solver's internal basis choice.
template <typename Real>
EigenPair<Real> max_eigvec(const CMatrix<Real>& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw PreconditionError("max_eigvec needs a nonempty square matrix");
    const Real scale = std::max(Real(1), A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > tolerance<Real>(1e-10) * scale)
        throw PreconditionError("max_eigvec needs a Hermitian matrix");

    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(A);
    const Index n = A.rows();
    const auto& values = solver.eigenvalues(); // ascending
    const Real top = values(n - 1);
    const Real tie = tolerance<Real>(1e-10) * scale;

    Index first = n - 1;
    while (first > 0 && top - values(first - 1) <= tie)
        --first;
    const auto space = solver.eigenvectors().rightCols(n - first);

    CVector<Real> x;
    if (space.cols() == 1) {
        x = space.col(0);
    } else {
        for (Index i = 0; i < n; ++i) {
            x = space * space.row(i).adjoint();
            if (x.norm() > Real(1e-6))
                break;
        }
    }
    x.normalize();
    fix_phase(x);
    return {top, std::move(x)};
}

} // namespace qbc
