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

#include "qbc/engine.hpp"
#include "qbc/errors.hpp"
#include "qbc/transmission.hpp"
#include "test_support.hpp"

using namespace qbc;
using cd = std::complex<double>;
using Mat = CMatrix<double>;
using Vec = CVector<double>;
using Effective = EffectiveChannel<double>;

namespace {

Effective make_effective(const Vec& h, const Vec& reported) {
    Effective e;
    e.h_eff = h;
    e.gamma = Vec::Ones(1);
    e.norm2 = h.squaredNorm();
    e.quant.direction = reported.normalized();
    e.strategy = Strategy::None;
    return e;
}

double max_cross_talk(const Mat& dirs, const Mat& v) {
    double worst = 0.0;
    for (Index k = 0; k < dirs.cols(); ++k)
        for (Index j = 0; j < v.cols(); ++j)
            if (j != k)
                worst = std::max(worst, std::abs(dirs.col(k).dot(v.col(j))));
    return worst;
}

Scenario base(int M, int N, int K) {
    Scenario s;
    s.M = M;
    s.N = N;
    s.K = K;
    return s;
}

} // namespace

TEST_CASE("zero-forcing on the standard basis is the identity") {
    for (int m : {1, 2, 4, 6}) {
        const Mat v = zf_beamformers<double>(Mat::Identity(m, m));
        CHECK((v - Mat::Identity(m, m)).norm() <= 1e-14);
    }
}

TEST_CASE("zero-forcing 2x2 hand case") {
    Mat dirs(2, 2);
    dirs << 1, 1 / std::numbers::sqrt2, 0, 1 / std::numbers::sqrt2;
    const Mat v = zf_beamformers(dirs);
    Vec v1(2), v2(2);
    v1 << 1 / std::numbers::sqrt2, -1 / std::numbers::sqrt2;
    v2 << 0, 1;
    CHECK(std::abs(std::abs(v.col(0).dot(v1)) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(v.col(1).dot(v2)) - 1.0) <= 1e-12);
    CHECK(max_cross_talk(dirs, v) <= 1e-12);
}

TEST_CASE("zero-forcing errors") {
    Mat dup(3, 2);
    dup.col(0) = Vec::Unit(3, 0);
    dup.col(1) = Vec::Unit(3, 0);
    CHECK_THROWS_AS(zf_beamformers(dup), SchedulingError);
    CHECK_THROWS_AS(zf_beamformers<double>(Mat::Identity(2, 3)), SchedulingError);
    CHECK_THROWS_AS(zf_beamformers<double>(Mat(3, 0)), SchedulingError);
}

TEST_CASE("zero-forcing exactness and unit norms on random directions") {
    RandomStream rng(1);
    for (int t = 0; t < 2000; ++t) {
        const int m = 2 + t % 5;
        const int k = 1 + (t / 5) % m;
        Mat dirs = random_complex_gaussian<double>(m, k, rng);
        dirs.colwise().normalize();
        const Mat v = zf_beamformers(dirs);
        REQUIRE(max_cross_talk(dirs, v) <= 1e-8);
        for (Index j = 0; j < v.cols(); ++j)
            REQUIRE(std::abs(v.col(j).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("SINR arithmetic") {
    BeamformerSet<double> bf;
    bf.vectors = Mat::Identity(2, 2);
    bf.powers = {5.0, 5.0};
    bf.users = {0, 1};
    CHECK(sinr<double>(Vec::Unit(2, 0), 0, bf) == doctest::Approx(5.0));

    Vec h(2);
    h << 1.0, 0.5;
    // 5 * 1 / (1 + 5 * 0.25)
    CHECK(sinr<double>(h, 0, bf) == doctest::Approx(5.0 / 2.25));
}

TEST_CASE("no quantization error means no interference") {
    RandomStream rng(2);
    const double P = 100.0;
    for (int t = 0; t < 200; ++t) {
        std::vector<Effective> eff;
        for (int k = 0; k < 4; ++k) {
            const Vec h = random_complex_gaussian<double>(4, rng);
            eff.push_back(make_effective(h, h));
        }
        const auto bf = equal_power_beamformers<double>(eff, P, TransmitMode::Feedback);
        for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t j = 0; j < 4; ++j)
                if (j != k)
                    REQUIRE(bf.powers[j] * std::norm(eff[k].h_eff.dot(bf.vectors.col(Index(j)))) <= 1e-8 * P);
    }
}

TEST_CASE("interference coupling averages sin^2 / (M-1)") {
    RandomStream rng(3);
    const int M = 4;
    const auto cb = Codebook<double>::emulated(M, 6.0);
    std::vector<double> diff;
    for (int t = 0; t < 20000; ++t) {
        std::vector<Effective> eff;
        for (int k = 0; k < M; ++k)
            eff.push_back(combine(Strategy::Qbc, sample_channel(M, 2, rng), cb, rng));
        const auto bf = equal_power_beamformers<double>(eff, 1.0, TransmitMode::Feedback);
        for (int k = 0; k < M; ++k) {
            const Vec unit = eff[k].h_eff.normalized();
            const double e = eff[k].direction_error();
            for (int j = 0; j < M; ++j)
                if (j != k)
                    diff.push_back(std::norm(unit.dot(bf.vectors.col(j))) - e / (M - 1));
        }
    }
    CHECK(std::abs(test::mean(diff)) <= 3 * test::std_error(diff));
}

TEST_CASE("equal power with CSIT on orthonormal channels") {
    const int M = 4;
    const double P = 10.0;
    std::vector<Effective> eff;
    for (int k = 0; k < M; ++k) {
        const Vec h = (0.5 + k) * Vec::Unit(M, k);
        eff.push_back(make_effective(h, Vec::Unit(M, (k + 1) % M)));
    }
    const auto rates = equal_power_round<double>(eff, P, TransmitMode::ZfCsit);
    REQUIRE(rates.size() == std::size_t(M));
    for (int k = 0; k < M; ++k)
        CHECK(rates[k] == doctest::Approx(std::log2(1.0 + P / M * eff[k].norm2)));
}

TEST_CASE("equal power requires K >= M and drops users from singular sets") {
    std::vector<Effective> eff;
    for (int k = 0; k < 2; ++k)
        eff.push_back(make_effective(Vec::Unit(3, 0), Vec::Unit(3, 0)));
    CHECK_THROWS_AS(equal_power_beamformers<double>(eff, 1.0, TransmitMode::Feedback), PreconditionError);
    eff.push_back(make_effective(Vec::Unit(3, 2), Vec::Unit(3, 2)));
    const auto bf = equal_power_beamformers<double>(eff, 6.0, TransmitMode::Feedback);
    CHECK(bf.users == std::vector<int>{0, 2});
    CHECK(bf.powers == std::vector<double>{3.0, 3.0});
}

TEST_CASE("feedback rates converge to ZF-CSIT on the same effective channels with many bits") {
    RandomStream rng(5);
    const auto cb = Codebook<double>::emulated(4, 40.0);
    for (double snr_db : {10.0, 20.0}) {
        const double P = db_to_linear(snr_db);
        std::vector<double> diff;
        for (int t = 0; t < 5000; ++t) {
            std::vector<Effective> eff;
            for (int k = 0; k < 4; ++k)
                eff.push_back(combine(Strategy::Qbc, sample_channel(4, 2, rng), cb, rng));
            const auto fb = equal_power_round<double>(eff, P, TransmitMode::Feedback);
            const auto csit = equal_power_round<double>(eff, P, TransmitMode::ZfCsit);
            for (std::size_t k = 0; k < 4; ++k)
                diff.push_back(csit[k] - fb[k]);
        }
        CHECK(std::abs(test::mean(diff)) <= 0.05);
    }
}

TEST_CASE("scaled feedback keeps the sum-rate gap within M log2 b (M=6, N=2, b=2)") {
    Scenario s = base(6, 2, 6);
    s.feedback = FeedbackKind::Scaled;
    s.b_gap = 2.0;
    s.snr_db = {0, 5, 10, 15, 20, 25};
    s.trials = 4000;
    s.seed = 6;
    Scenario c = s;
    c.csit = Csit::Perfect;
    const TrialTable fb = run_trials(s, {1});
    const TrialTable csit = run_trials(c, {1});
    for (std::size_t p = 0; p < s.snr_db.size(); ++p) {
        const MeanSe d = test::paired_difference(csit, fb, p);
        INFO("snr_db = " << s.snr_db[p] << ", gap = " << d.mean);
        CHECK(d.mean <= 6.0);
    }
}

TEST_CASE("waterfilling") {
    const std::vector<double> equal{2.0, 2.0, 2.0};
    for (double p : waterfilling(equal, 3.0))
        CHECK(p == doctest::Approx(1.0));

    const std::vector<double> lopsided{1.0, 1e-9};
    const auto w = waterfilling(lopsided, 1.0);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == 0.0);

    CHECK_THROWS_AS(waterfilling(std::vector<double>{}, 1.0), PreconditionError);
    CHECK_THROWS_AS(waterfilling(std::vector<double>{1.0, 0.0}, 1.0), PreconditionError);
}

TEST_CASE("waterfilling matches a grid-search maximizer") {
    RandomStream rng(7);
    auto rate = [](const std::vector<double>& g, double p1, double p2, double p3) {
        return std::log2(1 + p1 * g[0]) + std::log2(1 + p2 * g[1]) + std::log2(1 + p3 * g[2]);
    };
    for (int t = 0; t < 5; ++t) {
        const std::vector<double> g{0.1 + 3 * rng.uniform(), 0.1 + 3 * rng.uniform(), 0.1 + 3 * rng.uniform()};
        const double P = 0.5 + 4 * rng.uniform();
        const auto w = waterfilling(g, P);
        double total = 0.0;
        for (double p : w) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - P) <= 1e-9);
        const double wf = rate(g, w[0], w[1], w[2]);

        // 10^6 grid points over the simplex p1 + p2 + p3 = P.
        const int n = 1414;
        double best = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
                best = std::max(best, rate(g, P * i / n, P * j / n, P * (n - i - j) / n));
        CHECK(wf >= best - 1e-12);
        CHECK(wf - best <= 1e-4);
    }
}

TEST_CASE("greedy selection edge cases") {
    UserReport<double> a{7, Vec::Unit(3, 0), 1.0};
    const auto single = greedy_user_selection<double>(std::vector{a}, 5.0);
    CHECK(single.users == std::vector<int>{7});
    CHECK(single.powers == std::vector<double>{5.0});
    CHECK(std::abs(single.vectors.col(0).dot(Vec::Unit(3, 0))) == doctest::Approx(1.0));

    UserReport<double> b{8, Vec::Unit(3, 0), 2.0};
    const auto dup = greedy_user_selection<double>(std::vector{a, b}, 5.0);
    CHECK(dup.users == std::vector<int>{8});
}

TEST_CASE("greedy selection conserves power and zero-forces its users") {
    RandomStream rng(8);
    for (int t = 0; t < 500; ++t) {
        std::vector<UserReport<double>> reports;
        for (int k = 0; k < 10; ++k) {
            const Vec h = random_complex_gaussian<double>(4, rng);
            reports.push_back({k, h.normalized(), h.norm()});
        }
        const double P = db_to_linear(-10.0 + 40.0 * rng.uniform());
        const auto bf = greedy_user_selection<double>(reports, P);
        REQUIRE(!bf.users.empty());
        REQUIRE(bf.users.size() <= 4);
        double total = 0.0;
        for (double p : bf.powers)
            total += p;
        REQUIRE(std::abs(total - P) <= 1e-9 * std::max(1.0, P));
        Mat dirs(4, Index(bf.users.size()));
        for (std::size_t k = 0; k < bf.users.size(); ++k)
            dirs.col(Index(k)) = reports[bf.users[k]].direction;
        REQUIRE(max_cross_talk(dirs, bf.vectors) <= 1e-8);
    }
}

TEST_CASE("equal-power rounds conserve power") {
    RandomStream rng(9);
    const auto cb = Codebook<double>::emulated(4, 3.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<Effective> eff;
        for (int k = 0; k < 4; ++k)
            eff.push_back(combine(Strategy::Qbc, sample_channel(4, 2, rng), cb, rng));
        for (TransmitMode mode : {TransmitMode::Feedback, TransmitMode::ZfCsit}) {
            const auto bf = equal_power_beamformers<double>(eff, 10.0, mode);
            double total = 0.0;
            for (double p : bf.powers)
                total += p;
            REQUIRE(std::abs(total - 10.0) <= 1e-9);
        }
    }
}

TEST_CASE("greedy sum rate grows with the candidate pool on nested draws") {
    RandomStream rng(10);
    const double P = 10.0;
    const auto cb = Codebook<double>::emulated(4, 10.0);
    std::vector<double> d48, d816;
    for (int t = 0; t < 3000; ++t) {
        std::vector<Effective> eff;
        std::vector<UserReport<double>> reports;
        for (int k = 0; k < 16; ++k) {
            eff.push_back(combine(Strategy::Qbc, sample_channel(4, 2, rng), cb, rng));
            reports.push_back(make_report(k, eff.back(), TransmitMode::Feedback));
        }
        double rate[3];
        int i = 0;
        for (std::size_t K : {4u, 8u, 16u}) {
            const auto bf = greedy_user_selection<double>(std::span(reports).first(K), P);
            double sum = 0.0;
            for (double r : scheduled_rates<double>(eff, bf))
                sum += r;
            rate[i++] = sum;
        }
        d48.push_back(rate[1] - rate[0]);
        d816.push_back(rate[2] - rate[1]);
    }
    CHECK(test::mean(d48) > 0.0);
    CHECK(test::mean(d816) > 0.0);
}

TEST_CASE("feedback never beats ZF-CSIT and the gap respects its bound") {
    for (int bits : {6, 10, 14}) {
        Scenario s = base(4, 2, 4);
        s.bits = bits;
        s.snr_db = {0, 10, 20};
        s.trials = 4000;
        s.seed = 11;
        Scenario c = s;
        c.csit = Csit::Perfect;
        const TrialTable fb = run_trials(s, {1});
        const TrialTable csit = run_trials(c, {1});
        for (std::size_t p = 0; p < s.snr_db.size(); ++p) {
            const MeanSe d = test::paired_difference(csit, fb, p, &TrialMetrics::per_user_rate);
            const double bound = rate_gap_bound(4, 2, bits, db_to_linear(s.snr_db[p]));
            INFO("B = " << bits << ", snr_db = " << s.snr_db[p] << ", gap = " << d.mean << " +- " << d.se
                        << ", bound = " << bound);
            CHECK(d.mean >= -3 * d.se);
            CHECK(d.mean <= bound + 3 * d.se);
        }
    }
}

TEST_CASE("greedy at K=20: QBC above MRC and antenna selection") {
    Scenario s = base(4, 2, 20);
    s.bits = 10;
    s.codebook = CodebookMode::Explicit;
    s.scheduler = Scheduler::GreedyWaterfilling;
    s.snr_db = {10.0};
    s.trials = 2000;
    s.seed = 12;
    const TrialTable q = run_trials(s, {1});
    for (Strategy other : {Strategy::Mrc, Strategy::AntennaSelection}) {
        Scenario o = s;
        o.strategy = other;
        const MeanSe d = test::paired_difference(q, run_trials(o, {1}), 0);
        INFO(to_string(other) << ": gap = " << d.mean << " +- " << d.se);
        CHECK(d.mean >= 3 * d.se);
    }
}

TEST_CASE("block-diagonalization reference curve") {
    const std::vector<double> zf{1.0, 5.0, 12.0};
    CHECK(bd_csit_reference(4, 1, zf) == zf);
    const auto bd2 = bd_csit_reference(4, 2, zf);
    const auto bd3 = bd_csit_reference(6, 3, zf);
    for (std::size_t i = 0; i < zf.size(); ++i) {
        CHECK(bd2[i] - zf[i] == doctest::Approx(2.0 * std::numbers::log2e));
        CHECK(bd3[i] - zf[i] == doctest::Approx(5.0 * std::numbers::log2e));
    }
    CHECK(bd2[0] - zf[0] == doctest::Approx(2.885).scale(0).epsilon(1e-3));
    CHECK(bd3[0] - zf[0] == doctest::Approx(7.21).scale(0).epsilon(1e-3));
}
