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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qbc/combining.hpp"
#include "qbc/errors.hpp"
#include "test_support.hpp"

using namespace qbc;
using cd = std::complex<double>;
using Mat = CMatrix<double>;
using Vec = CVector<double>;

namespace {

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = test::mean(x), my = test::mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double mean_error(Strategy s, int M, int N, int B, int trials, std::uint64_t seed) {
    RandomStream rng(seed);
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ChannelMatrix<double> H = sample_channel(M, N, rng);
        const auto cb = generate_rvq(M, B, rng);
        sum += combine(s, H, cb, rng).direction_error();
    }
    return sum / trials;
}

} // namespace

TEST_CASE("every strategy yields unit combiners and h_eff = H gamma") {
    RandomStream rng(1);
    for (int t = 0; t < 300; ++t) {
        const ChannelMatrix<double> H = sample_channel(4, 2, rng);
        const auto ex = generate_rvq(4, 6, rng);
        const auto em = Codebook<double>::emulated(4, 9.5);
        for (Strategy s : {Strategy::Qbc, Strategy::AntennaSelection, Strategy::Mrc, Strategy::MaxEigenvector,
                           Strategy::None}) {
            for (const auto* cb : {&ex, &em}) {
                if (s == Strategy::Mrc && !cb->is_explicit())
                    continue;
                const auto e = combine(s, H, *cb, rng);
                REQUIRE(std::abs(e.gamma.norm() - 1.0) <= 1e-12);
                REQUIRE((e.h_eff - H.matrix() * e.gamma).norm() <= 1e-10);
                REQUIRE(e.norm2 == doctest::Approx(e.h_eff.squaredNorm()));
                REQUIRE(std::abs(e.quant.direction.norm() - 1.0) <= 1e-12);
                REQUIRE(e.strategy == s);
            }
        }
    }
}

TEST_CASE("MRC refuses emulated codebooks") {
    RandomStream rng(2);
    const ChannelMatrix<double> H = sample_channel(4, 2, rng);
    CHECK_THROWS_AS(mrc(H, Codebook<double>::emulated(4, 10)), PreconditionError);
}

TEST_CASE("QBC with N=1 is plain vector quantization") {
    RandomStream rng(3);
    for (int t = 0; t < 200; ++t) {
        const ChannelMatrix<double> H = sample_channel(4, 1, rng);
        const auto cb = generate_rvq(4, 6, rng);
        const auto e = qbc::qbc(H, cb, rng);
        const auto v = quantize_vector(Vec(H.matrix().col(0)), cb);
        CHECK(std::abs(e.gamma(0) - cd(1.0, 0.0)) <= 1e-14);
        CHECK(e.quant.index == v.index);
        CHECK(e.direction_error() == doctest::Approx(v.sin2_error).scale(0).epsilon(1e-10));
    }
}

TEST_CASE("QBC hand example: M=3, N=2, H=[e1 e2], w=(0, 0.6, 0.8)") {
    Mat Hm = Mat::Zero(3, 2);
    Hm(0, 0) = 1;
    Hm(1, 1) = 1;
    const ChannelMatrix<double> H(Hm);
    Mat w(3, 1);
    w << 0, 0.6, 0.8;
    const auto cb = Codebook<double>::from_vectors(w);
    RandomStream rng(4);
    const auto e = qbc::qbc(H, cb, rng);
    CHECK((e.gamma - Vec::Unit(2, 1)).norm() <= 1e-14);
    CHECK((e.h_eff - Vec::Unit(3, 1)).norm() <= 1e-14);
    CHECK(e.direction_error() == doctest::Approx(0.64).scale(0).epsilon(1e-14));

    // No direction in span(H) does better (fine grid).
    double best = 1.0;
    for (int i = 0; i <= 400; ++i)
        for (int k = 0; k < 64; ++k) {
            const double th = i * std::numbers::pi / 800.0;
            const double ph = k * 2.0 * std::numbers::pi / 64.0;
            Vec d(3);
            d << std::cos(th), std::polar(std::sin(th), ph), 0.0;
            best = std::min(best, 1.0 - std::norm(w.col(0).dot(d)));
        }
    CHECK(best >= 0.64 - 1e-12);
}

TEST_CASE("QBC error to h_eff equals the codeword's angle to span(H)") {
    RandomStream rng(5);
    for (int t = 0; t < 1000; ++t) {
        const ChannelMatrix<double> H = sample_channel(5, 3, rng);
        const auto cb = generate_rvq(5, 7, rng);
        const auto e = qbc::qbc(H, cb, rng);
        const double span_error = project_onto_span(e.quant.direction, H.basis()).sin2;
        REQUIRE(std::abs(e.direction_error() - span_error) <= 1e-10);
        REQUIRE(std::abs(e.quant.sin2_error - span_error) <= 1e-10);
    }
}

TEST_CASE("QBC optimality against a grid of directions in span(H)") {
    RandomStream rng(6);
    const int grid = 100;
    for (int t = 0; t < 1000; ++t) {
        const ChannelMatrix<double> H = sample_channel(4, 2, rng);
        const auto cb = generate_rvq(4, 4, rng);
        const double qbc_error = qbc::qbc(H, cb, rng).direction_error();
        Mat dirs(4, grid * grid);
        for (int i = 0; i < grid; ++i)
            for (int k = 0; k < grid; ++k) {
                const double th = (i + 0.5) * std::numbers::pi / (2.0 * grid);
                const double ph = k * 2.0 * std::numbers::pi / grid;
                dirs.col(i * grid + k) = std::cos(th) * H.basis().col(0) + std::polar(std::sin(th), ph) * H.basis().col(1);
            }
        const RMatrix<double> cos2 = (cb.vectors().adjoint() * dirs).cwiseAbs2();
        const double best_grid = 1.0 - cos2.maxCoeff();
        REQUIRE(best_grid >= qbc_error - 1e-6);
    }
}

TEST_CASE("effective channel laws under explicit QBC (M=4, N=2, B=10)") {
    RandomStream rng(7);
    std::vector<double> norm2, proj, err0, err1;
    const Vec x = Vec::Unit(4, 2);
    for (int t = 0; t < 100000; ++t) {
        double e[2];
        for (int k = 0; k < 2; ++k) {
            const ChannelMatrix<double> H = sample_channel(4, 2, rng);
            const auto eff = qbc::qbc(H, generate_rvq(4, 10, rng), rng);
            norm2.push_back(eff.norm2);
            proj.push_back(std::norm(x.dot(eff.h_eff)) / eff.norm2);
            e[k] = eff.direction_error();
        }
        err0.push_back(e[0]);
        err1.push_back(e[1]);
    }
    CHECK(test::ks(norm2, [](double v) { return chi2_2k_cdf(v, 3); }) < 0.015);
    CHECK(test::mean(norm2) == doctest::Approx(3.0).scale(0).epsilon(0.01));
    CHECK(test::ks(proj, [](double v) { return beta_cdf(v, {1, 3}); }) < 0.015);

    const double m0 = test::mean(err0), m1 = test::mean(err1);
    double c = 0, v0 = 0, v1 = 0;
    for (std::size_t i = 0; i < err0.size(); ++i) {
        c += (err0[i] - m0) * (err1[i] - m1);
        v0 += (err0[i] - m0) * (err0[i] - m0);
        v1 += (err1[i] - m1) * (err1[i] - m1);
    }
    CHECK(std::abs(c / std::sqrt(v0 * v1)) < 0.01);
}

TEST_CASE("emulated QBC reproduces the norm law") {
    RandomStream rng(8);
    const auto cb = Codebook<double>::emulated(4, 30.0);
    std::vector<double> norm2;
    for (int t = 0; t < 100000; ++t)
        norm2.push_back(qbc::qbc(sample_channel(4, 2, rng), cb, rng).norm2);
    CHECK(test::ks(norm2, [](double v) { return chi2_2k_cdf(v, 3); }) < 0.015);
}

TEST_CASE("antenna selection") {
    RandomStream rng(9);
    for (int t = 0; t < 500; ++t) {
        const ChannelMatrix<double> H1 = sample_channel(4, 1, rng);
        const auto cb = generate_rvq(4, 6, rng);
        const auto as = antenna_selection(H1, cb, rng);
        const auto none = no_combining(H1, cb, rng);
        REQUIRE(as.quant.index == none.quant.index);
        REQUIRE((as.h_eff - none.h_eff).norm() == 0.0);

        const ChannelMatrix<double> H = sample_channel(4, 3, rng);
        const auto sel = antenna_selection(H, cb, rng);
        for (Index j = 0; j < 3; ++j)
            REQUIRE(sel.direction_error() <= quantize_vector(Vec(H.matrix().col(j)), cb).sin2_error + 1e-12);
    }
}

TEST_CASE("antenna selection matches a single antenna with B + log2 N bits") {
    RandomStream rng(10);
    std::vector<double> as_ex, as_em, single;
    const auto em = Codebook<double>::emulated(4, 6.0);
    for (int t = 0; t < 20000; ++t) {
        const ChannelMatrix<double> H = sample_channel(4, 2, rng);
        as_ex.push_back(antenna_selection(H, generate_rvq(4, 6, rng), rng).direction_error());
        as_em.push_back(antenna_selection(H, em, rng).direction_error());
        const ChannelMatrix<double> H1 = sample_channel(4, 1, rng);
        single.push_back(no_combining(H1, generate_rvq(4, 7, rng), rng).direction_error());
    }
    CHECK(std::abs(test::mean(as_ex) - test::mean(single)) <
          3 * std::hypot(test::std_error(as_ex), test::std_error(single)));
    CHECK(std::abs(test::mean(as_ex) - test::mean(as_em)) <
          3 * std::hypot(test::std_error(as_ex), test::std_error(as_em)));
}

TEST_CASE("MRC basics") {
    RandomStream rng(11);
    for (int t = 0; t < 500; ++t) {
        const ChannelMatrix<double> H1 = sample_channel(4, 1, rng);
        const auto cb = generate_rvq(4, 6, rng);
        REQUIRE(mrc(H1, cb).quant.index == quantize_vector(Vec(H1.matrix().col(0)), cb).index);

        const ChannelMatrix<double> H = sample_channel(4, 2, rng);
        const auto e = mrc(H, cb);
        const Mat gram = H.matrix().adjoint() * H.matrix();
        const double lmax = Eigen::SelfAdjointEigenSolver<Mat>(gram).eigenvalues().maxCoeff();
        REQUIRE(e.norm2 <= lmax * (1 + 1e-12));
        const Vec expected = H.matrix() * (H.matrix().adjoint() * e.quant.direction).normalized();
        REQUIRE(std::abs(std::abs(expected.dot(e.h_eff)) - expected.squaredNorm()) <= 1e-10);
    }
}

TEST_CASE("max-eigenvector combining") {
    Mat Hm = Mat::Zero(3, 2);
    Hm(0, 0) = 2;
    Hm(1, 1) = 1;
    const ChannelMatrix<double> H(Hm);
    RandomStream rng(12);
    const auto cb = generate_rvq(3, 4, rng);
    const auto e = max_eig_combining(H, cb, rng);
    CHECK((e.gamma - Vec::Unit(2, 0)).norm() <= 1e-12);
    CHECK(e.norm2 == doctest::Approx(4.0));

    for (int t = 0; t < 500; ++t) {
        const ChannelMatrix<double> G = sample_channel(4, 2, rng);
        const auto r = max_eig_combining(G, generate_rvq(4, 6, rng), rng);
        const Mat gram = G.matrix().adjoint() * G.matrix();
        const double lmax = Eigen::SelfAdjointEigenSolver<Mat>(gram).eigenvalues().maxCoeff();
        REQUIRE(std::abs(r.norm2 - lmax) <= 1e-8 * std::max(1.0, lmax));
        REQUIRE(r.direction_error() == doctest::Approx(r.quant.sin2_error).scale(0).epsilon(1e-9));
    }
}

TEST_CASE("MRC and max-eigenvector errors decay like 2^(-B/(M-1))") {
    for (Strategy s : {Strategy::Mrc, Strategy::MaxEigenvector}) {
        std::vector<double> bits, log_err;
        for (int B : {8, 10, 12, 14}) {
            bits.push_back(B);
            log_err.push_back(std::log2(mean_error(s, 4, 2, B, 2000, 100 + B)));
        }
        INFO(to_string(s));
        CHECK(slope(bits, log_err) == doctest::Approx(-1.0 / 3.0).scale(0).epsilon(0.15));
    }
}

TEST_CASE("error ordering at equal B: QBC < antenna selection < none") {
    const int trials = 4000;
    RandomStream rng(13);
    std::vector<double> q, a, n;
    for (int t = 0; t < trials; ++t) {
        const ChannelMatrix<double> H = sample_channel(4, 2, rng);
        const auto cb = generate_rvq(4, 8, rng);
        q.push_back(qbc::qbc(H, cb, rng).direction_error());
        a.push_back(antenna_selection(H, cb, rng).direction_error());
        n.push_back(no_combining(H, cb, rng).direction_error());
    }
    CHECK(test::mean(a) - test::mean(q) > 3 * std::hypot(test::std_error(a), test::std_error(q)));
    CHECK(test::mean(n) - test::mean(a) > 3 * std::hypot(test::std_error(n), test::std_error(a)));
}

TEST_CASE("receiver channel estimate") {
    RandomStream rng(14);
    const ChannelMatrix<double> H = sample_channel(4, 2, rng);
    const auto perfect = make_rx_estimate(H, std::numeric_limits<double>::infinity(), 10.0, rng);
    CHECK(perfect.g_hat == H.matrix());

    std::vector<cd> est, res;
    for (int t = 0; t < 12500; ++t) {
        const ChannelMatrix<double> G = sample_channel(4, 2, rng);
        const auto e = make_rx_estimate(G, 1.0, 10.0, rng);
        for (Index i = 0; i < 8; ++i) {
            est.push_back(e.g_hat(i));
            res.push_back(G.matrix()(i) - e.g_hat(i));
        }
    }
    double var = 0, ve = 0;
    cd cross = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        var += std::norm(res[i]);
        ve += std::norm(est[i]);
        cross += std::conj(est[i]) * res[i];
    }
    const double n = double(res.size());
    CHECK(var / n == doctest::Approx(1.0 / 11.0).scale(0).epsilon(0.05));
    CHECK(std::abs(cross) / std::sqrt(var * ve) < 0.01);
    CHECK_THROWS_AS(make_rx_estimate(H, 0.5, 10.0, rng), PreconditionError);
}

TEST_CASE("combining on an infinite-pilot estimate equals combining on H") {
    for (int t = 0; t < 100; ++t) {
        RandomStream ch(1000 + t);
        const ChannelMatrix<double> H = sample_channel(4, 2, ch);
        const auto cb = Codebook<double>::emulated(4, 12.0);
        RandomStream a(t), b(t), noise(t + 7);
        const auto est = make_rx_estimate(H, std::numeric_limits<double>::infinity(), 100.0, noise);
        const auto direct = qbc::qbc(H, cb, a);
        const auto via = combine_with_estimate(est, Strategy::Qbc, cb, b);
        REQUIRE(direct.h_eff == via.h_eff);
        REQUIRE(direct.quant.direction == via.quant.direction);
    }
}
