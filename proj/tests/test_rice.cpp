// SPDX-License-Identifier: Apache-2.0
//
// fddest - structured-training channel estimation for FDD massive MIMO
// Copyright (C) 2026 The fddest authors
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

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

#include "fddest/harness.hpp"
#include "fddest/rice.hpp"
#include "test_util.hpp"

using namespace fddest;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct Setup {
    ArrayGeometry geom;
    TrainingSequence ts;
    MultipathParams truth;
    ComplexMatrix h;
    ComplexMatrix y;
};

Setup make_setup(const ArrayGeometry& geom, std::size_t l, const MultipathParams& truth, double snr_db, Rng& rng) {
    Setup s{geom, training::build_training(geom, l, rng), truth, {}, {}};
    s.h = channel::synth_channel(truth, geom);
    s.y = channel::received(s.h, training::full_matrix(s.ts), snr_db, rng);
    return s;
}

MultipathParams with_rician_gains(MultipathParams p, Rng& rng) {
    for (auto& b : p.beta) b = channel::rician_gain(10.0, 1.0, rng);
    return p;
}

double abs_cos(const ComplexVector& a, const ComplexVector& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

// Truth factor columns matched to estimated ones by collinearity.
double worst_collinearity(const ComplexMatrix& est, const ComplexMatrix& truth) {
    double worst = 1.0;
    for (Eigen::Index t = 0; t < truth.cols(); ++t) {
        double best = 0.0;
        for (Eigen::Index e = 0; e < est.cols(); ++e) best = std::max(best, abs_cos(est.col(e), truth.col(t)));
        worst = std::min(worst, best);
    }
    return worst;
}
}  // namespace

TEST_CASE("plan_smoothing") {
    CHECK(rice::plan_smoothing(3, 4, 4).k_max == 4);
    CHECK(rice::plan_smoothing(4, 4, 4).k_max == 8);
    CHECK(rice::plan_smoothing(3, 6, 6).k_max == 6);
    const SmoothingPlan p = rice::plan_smoothing(4, 4, 4);
    CHECK(p.p_r + p.q_r == 5);
    CHECK(p.p_r == 3);
    CHECK_THROWS_AS(rice::plan_smoothing(1, 4, 4), std::invalid_argument);

    // Brute force over every split, smallest P_r among maximizers.
    for (std::size_t m = 2; m <= 9; ++m) {
        for (std::size_t n : {4u, 6u, 8u}) {
            std::size_t best = 0, best_p = 0;
            for (std::size_t pr = 2; pr <= m; ++pr) {
                const std::size_t v = std::min((pr - 1) * n, (m + 1 - pr) * n);
                if (v > best) best = v, best_p = pr;
            }
            const SmoothingPlan got = rice::plan_smoothing(m, n, n);
            CHECK(got.k_max == best);
            CHECK(got.p_r == best_p);
            CHECK(rice::plan_smoothing(m + 1, n, n).k_max >= got.k_max);
        }
    }
}

TEST_CASE("factor_estimate, noiseless") {
    Rng rng(11);
    SUBCASE("single path factors are collinear with the truth") {
        const ArrayGeometry g{3, 10, 10, 0.5};
        Setup s = make_setup(g, 2, {{0.7}, {-1.1}, {2.0}, {cplx{0.8, 0.3}}}, kNoiseless, rng);
        const FactorEstimate f = rice::factor_estimate(s.y, 1, rice::plan_smoothing(3, 4, 4), 4, 4);
        const ComplexVector cx = s.ts.s_x.adjoint() * channel::steering_ula(-1.1, 10);
        const ComplexVector cy = s.ts.s_y.adjoint() * channel::steering_ula(2.0, 10);
        CHECK(abs_cos(f.c_x.col(0), cx) > 1.0 - 1e-10);
        CHECK(abs_cos(f.c_y.col(0), cy) > 1.0 - 1e-10);
        CHECK(abs_cos(f.b_r.col(0), channel::steering_ula(0.7, 3)) > 1.0 - 1e-10);
    }
    SUBCASE("eight printed paths reproduce the received block") {
        const ArrayGeometry g{4, 10, 10, 0.5};
        Setup s = make_setup(g, 2, harness::paper_phases("fig2b"), kNoiseless, rng);
        const FactorEstimate f = rice::factor_estimate(s.y, 8, rice::plan_smoothing(4, 4, 4), 4, 4);
        const ComplexMatrix y_hat = f.b_r * mdalg::khatri_rao(f.c_y, f.c_x).adjoint();
        CHECK(fddest::test::rel_err(y_hat, s.y) < 1e-8);
    }
    SUBCASE("random K = 3 matches every factor column") {
        const ArrayGeometry g{4, 8, 6, 0.5};
        const MultipathParams truth = channel::random_scenario(3, g, rng);
        Setup s = make_setup(g, 2, truth, kNoiseless, rng);
        const FactorEstimate f = rice::factor_estimate(s.y, 3, rice::plan_smoothing(4, 4, 4), 4, 4);
        CHECK(worst_collinearity(f.c_x, s.ts.s_x.adjoint() * channel::steering_matrix(truth.omega_x, 8)) >
              1.0 - 1e-8);
        CHECK(worst_collinearity(f.c_y, s.ts.s_y.adjoint() * channel::steering_matrix(truth.omega_y, 6)) >
              1.0 - 1e-8);
        CHECK(worst_collinearity(f.b_r, channel::steering_matrix(truth.omega_r, 4)) > 1.0 - 1e-8);
    }
    SUBCASE("too many paths") {
        const ComplexMatrix y = ComplexMatrix::Ones(3, 16);
        CHECK_THROWS_AS(rice::factor_estimate(y, 5, rice::plan_smoothing(3, 4, 4), 4, 4), IdentifiabilityError);
    }
}

TEST_CASE("doa_phases") {
    ComplexMatrix b(5, 2);
    b.col(0) = channel::steering_ula(0.8 * pi, 5) * cplx{-2.0, 0.5};
    b.col(1) = ComplexVector::Ones(5);
    const auto w = rice::doa_phases(b);
    CHECK(std::abs(w[0] - 0.8 * pi) < 1e-12);
    CHECK(std::abs(w[1]) < 1e-15);

    Rng rng(12);
    std::uniform_real_distribution<double> u(-pi, pi);
    ComplexMatrix many(4, 100);
    std::vector<double> truth(100);
    for (Eigen::Index k = 0; k < 100; ++k) {
        truth[static_cast<std::size_t>(k)] = u(rng);
        many.col(k) = channel::steering_ula(truth[static_cast<std::size_t>(k)], 4) * std::polar(u(rng) + 4.0, u(rng));
    }
    const auto got = rice::doa_phases(many);
    for (std::size_t k = 0; k < 100; ++k) CHECK(phase_distance(got[k], truth[k]) < 1e-12);
}

TEST_CASE("dod_phases_cri") {
    Rng rng(13);
    const TrainingSequence ts = training::build_training({1, 10, 10, 0.5}, 2, rng);
    ComplexMatrix c(4, 3);
    c.col(0) = ts.s_x.adjoint() * channel::steering_ula(0.36 * pi, 10) * cplx{0.2, -1.7};
    c.col(1) = ts.s_x.adjoint() * channel::steering_ula(0.0, 10) * cplx{3.0, 0.0};
    c.col(2) = ts.s_x.adjoint() * channel::steering_ula(0.9 * pi, 10) * cplx{0.0, 1.0};
    const CriPhases p = rice::dod_phases_cri(c, 2);
    CHECK(std::abs(p.omega[0] - 0.36 * pi) < 1e-10);
    CHECK(std::abs(p.omega[1]) < 1e-10);
    CHECK(phase_distance(p.omega[2], 0.9 * pi) < 1e-10);
    CHECK(std::none_of(p.flagged.begin(), p.flagged.end(), [](bool f) { return f; }));

    ComplexMatrix dead = c;
    dead(1, 0) = 0.0;
    CHECK(rice::dod_phases_cri(dead, 2).flagged[0]);
    CHECK_THROWS_AS(rice::dod_phases_cri(c, 3), std::invalid_argument);
}

TEST_CASE("pathloss_rice, noiseless") {
    Rng rng(14);
    SUBCASE("unit gain") {
        Setup s = make_setup({3, 10, 10, 0.5}, 2, {{0.3}, {1.2}, {-0.4}, {1.0}}, kNoiseless, rng);
        const RiceResult r = rice::rice_estimate_full(s.y, 1, s.ts, s.geom);
        CHECK(std::abs(r.params.beta[0] - 1.0) < 1e-8);
    }
    SUBCASE("printed four-path scenario with Rician gains") {
        const MultipathParams truth = with_rician_gains(harness::paper_phases("fig2a"), rng);
        Setup s = make_setup({3, 10, 10, 0.5}, 2, truth, kNoiseless, rng);
        const RiceResult r = rice::rice_estimate_full(s.y, 4, s.ts, s.geom);
        const PathMatch m = metrics::match_paths(r.params, truth);
        CHECK(*std::max_element(m.gain_rel_errors.begin(), m.gain_rel_errors.end()) < 1e-6);

        const auto fwd = rice::pathloss_rice(r.factors, r.params, s.ts, GainAveraging::forward);
        const auto bwd = rice::pathloss_rice(r.factors, r.params, s.ts, GainAveraging::backward);
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(fwd[k] - bwd[k]) < 1e-8 * std::abs(fwd[k]));
    }
}

TEST_CASE("rice_estimate noiseless exactness") {
    Rng rng(15);
    struct Case {
        std::size_t m_r, m, l, k_max;
    };
    for (const Case c : {Case{3, 10, 2, 4}, Case{4, 10, 2, 8}, Case{4, 10, 3, 9}, Case{2, 7, 3, 6}}) {
        const ArrayGeometry g{c.m_r, c.m, c.m, 0.5};
        for (std::size_t k = 1; k <= c.k_max; ++k) {
            CAPTURE(c.m_r);
            CAPTURE(k);
            const MultipathParams truth = channel::random_scenario(k, g, rng);
            Setup s = make_setup(g, c.l, truth, kNoiseless, rng);
            const MultipathParams est = rice::rice_estimate(s.y, k, s.ts, g);
            CHECK(fddest::test::rel_err(rice::reconstruct_channel(est, g), s.h) < 1e-6);
        }
        Setup s = make_setup(g, c.l, channel::random_scenario(1, g, rng), kNoiseless, rng);
        CHECK_THROWS_AS(rice::rice_estimate(s.y, c.k_max + 1, s.ts, g), IdentifiabilityError);
    }
}

TEST_CASE("permutation and scaling leave the parameter set unchanged") {
    Rng rng(16);
    const MultipathParams truth = with_rician_gains(harness::paper_phases("fig2a"), rng);
    Setup s = make_setup({3, 10, 10, 0.5}, 2, truth, kNoiseless, rng);
    const RiceResult base = rice::rice_estimate_full(s.y, 4, s.ts, s.geom);

    auto params_from = [&](const FactorEstimate& f) {
        MultipathParams p;
        p.omega_r = rice::doa_phases(f.b_r);
        p.omega_x = rice::dod_phases_cri(f.c_x, 2).omega;
        p.omega_y = rice::dod_phases_cri(f.c_y, 2).omega;
        p.beta = rice::pathloss_rice(f, p, s.ts);
        return p;
    };

    std::uniform_real_distribution<double> u(-pi, pi);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Eigen::Index> perm(4);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        FactorEstimate f{ComplexMatrix(3, 4), ComplexMatrix(4, 4), ComplexMatrix(4, 4)};
        for (Eigen::Index k = 0; k < 4; ++k) {
            const cplx dx = std::polar(0.5 + std::abs(u(rng)), u(rng));
            const cplx dy = std::polar(0.5 + std::abs(u(rng)), u(rng));
            f.c_x.col(k) = base.factors.c_x.col(perm[k]) * dx;
            f.c_y.col(k) = base.factors.c_y.col(perm[k]) * dy;
            f.b_r.col(k) = base.factors.b_r.col(perm[k]) / (std::conj(dx) * std::conj(dy));
        }
        const PathMatch m = metrics::match_paths(params_from(f), base.params);
        CHECK(m.max_phase_error() < 1e-10);
        CHECK(*std::max_element(m.gain_rel_errors.begin(), m.gain_rel_errors.end()) < 1e-10);
    }
}

TEST_CASE("factor residual shrinks with SNR") {
    const ArrayGeometry g{4, 10, 10, 0.5};
    std::vector<double> medians;
    for (double snr : {0.0, 10.0, 20.0, 30.0}) {
        std::vector<double> res;
        for (std::uint64_t t = 0; t < 50; ++t) {
            Rng rng(1000 + t);
            Setup s = make_setup(g, 2, channel::random_scenario(4, g, rng), snr, rng);
            const FactorEstimate f = rice::factor_estimate(s.y, 4, rice::plan_smoothing(4, 4, 4), 4, 4);
            const ComplexMatrix y_hat = f.b_r * mdalg::khatri_rao(f.c_y, f.c_x).adjoint();
            res.push_back((s.y - y_hat).norm() / s.y.norm());
        }
        medians.push_back(metrics::median(res));
    }
    for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] < medians[i - 1]);
}

TEST_CASE("reconstruct_channel and canonical order") {
    const ArrayGeometry g{3, 4, 5, 0.5};
    const MultipathParams p{{0.4, -0.2}, {1.0, 2.0}, {0.1, -2.5}, {cplx{1, 1}, cplx{0, -2}}};
    CHECK(rice::reconstruct_channel(p, g) == channel::synth_channel(p, g));
    const MultipathParams sorted = rice::sorted_by_omega_r(p);
    CHECK(sorted.omega_r[0] == -0.2);
    CHECK(sorted.omega_y[0] == -2.5);
    CHECK(sorted.beta[1] == cplx(1, 1));
}
