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

#include "fddest/harness.hpp"
#include "fddest/ricer.hpp"
#include "test_util.hpp"

using namespace fddest;
using fddest::test::random_matrix;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double kNoiseless = std::numeric_limits<double>::infinity();

ComplexMatrix random_hermitian(Eigen::Index m, Rng& rng) {
    const ComplexMatrix a = random_matrix(m, m, rng);
    return a + a.adjoint();
}

double quad_form(const ComplexMatrix& p, double omega) {
    const ComplexVector a = channel::steering_ula(omega, static_cast<std::size_t>(p.rows()));
    return a.dot(p * a).real();
}

// Every root has a partner at 1/conj(z).
double worst_pairing(const RootSet& rs) {
    double worst = 0.0;
    for (const cplx z : rs.roots) {
        const cplx partner = 1.0 / std::conj(z);
        double best = std::numeric_limits<double>::infinity();
        for (const cplx w : rs.roots) best = std::min(best, std::abs(w - partner));
        worst = std::max(worst, best / std::max(1.0, std::abs(partner)));
    }
    return worst;
}
}  // namespace

TEST_CASE("projector") {
    Rng rng(21);
    const TrainingSequence ts = training::build_training({1, 10, 10, 0.5}, 2, rng);
    const ComplexVector a = channel::steering_ula(0.6, 10);
    const ComplexVector c = ts.s_x.adjoint() * a * cplx{0.4, 1.1};
    const ComplexMatrix p = ricer::projector(c, ts.s_x);
    CHECK(p.rows() == 10);
    CHECK((p - p.adjoint()).norm() < 1e-12);
    CHECK(std::abs(a.dot(p * a)) < 1e-16 * p.norm() * 10.0 * 1e3);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK_THROWS_AS(ricer::projector(ComplexVector::Zero(4), ts.s_x), std::invalid_argument);

    // Orthonormal basis of one vector gives the same projector.
    const ComplexMatrix u = c.normalized();
    CHECK((ricer::subspace_projector(u, ts.s_x) - p).norm() < 1e-12);
}

TEST_CASE("poly_coeffs") {
    SUBCASE("identity") {
        const ComplexVector c = ricer::poly_coeffs(ComplexMatrix::Identity(2, 2));
        REQUIRE(c.size() == 3);
        CHECK(std::abs(c(1) - 2.0) < 1e-15);
        CHECK(std::abs(c(0)) < 1e-15);
        CHECK(std::abs(c(2)) < 1e-15);
        for (double w : {-2.0, 0.0, 1.3}) CHECK(std::abs(ricer::eval_laurent(c, std::polar(1.0, w)) - 2.0) < 1e-14);
    }
    SUBCASE("random Hermitian") {
        Rng rng(22);
        std::uniform_real_distribution<double> u(-pi, pi);
        const ComplexMatrix p = random_hermitian(7, rng);
        const ComplexVector c = ricer::poly_coeffs(p);
        REQUIRE(c.size() == 13);
        for (Eigen::Index i = 0; i < 13; ++i) CHECK(std::abs(c(i) - std::conj(c(12 - i))) < 1e-12);
        for (int t = 0; t < 50; ++t) {
            const double w = u(rng);
            const double q = quad_form(p, w);
            const cplx v = ricer::eval_laurent(c, std::polar(1.0, w));
            CHECK(std::abs(v - q) < 1e-10 * std::max(1.0, std::abs(q)));
        }
    }
    CHECK_THROWS_AS(ricer::poly_coeffs(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("roots_inside") {
    Rng rng(23);
    SUBCASE("pairing on random projectors") {
        for (int draw = 0; draw < 100; ++draw) {
            const TrainingSequence ts = training::build_training({1, 10, 10, 0.5}, 2, rng);
            const ComplexVector c = random_matrix(4, 1, rng);
            const RootSet rs = ricer::roots_inside(ricer::poly_coeffs(ricer::projector(c, ts.s_x)));
            CHECK(rs.roots.size() == 18);
            CHECK(rs.inner.size() == 9);
            CHECK(worst_pairing(rs) < 1e-6);
            for (const cplx z : rs.inner) CHECK(std::abs(z) <= 1.0 + 1e-9);
        }
    }
    SUBCASE("noiseless single path puts a root on the circle") {
        const TrainingSequence ts = training::build_training({1, 10, 10, 0.5}, 2, rng);
        for (double w : {0.36 * pi, -2.9, 0.05}) {
            const ComplexVector c = ts.s_x.adjoint() * channel::steering_ula(w, 10);
            const RootSet rs = ricer::roots_inside(ricer::poly_coeffs(ricer::projector(c, ts.s_x)));
            const bool hit = std::any_of(rs.inner.begin(), rs.inner.end(), [&](cplx z) {
                return std::abs(std::abs(z) - 1.0) < 1e-6 && phase_distance(std::arg(z), w) < 1e-6;
            });
            CHECK(hit);
            CHECK(std::abs(ricer::select_root(rs, w + 0.01) - w) < 1e-6);
            CHECK(phase_distance(ricer::grid_search_phase(ricer::projector(c, ts.s_x)), w) < 2 * pi / 1e4);
        }
    }
    SUBCASE("degenerate input") {
        CHECK_THROWS(ricer::roots_inside(ComplexVector::Zero(5)));
    }
}

TEST_CASE("select_root") {
    const RootSet rs{{}, {std::polar(0.9, 0.3 * pi), std::polar(0.8, 0.9 * pi)}};
    CHECK(std::abs(ricer::select_root(rs, 0.33 * pi) - 0.3 * pi) < 1e-14);

    const RootSet wrap{{}, {std::polar(0.9, -0.95 * pi), std::polar(0.95, 0.5 * pi)}};
    CHECK(std::abs(ricer::select_root(wrap, 0.97 * pi) + 0.95 * pi) < 1e-14);

    const RootSet tie{{}, {std::polar(0.5, 0.2), std::polar(0.9, -0.2)}};
    for (int rep = 0; rep < 3; ++rep) CHECK(std::abs(ricer::select_root(tie, 0.0) + 0.2) < 1e-14);

    CHECK_THROWS(ricer::select_root(RootSet{}, 0.0));

    // Rotating every phase and the guess by delta rotates the answer.
    Rng rng(24);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int t = 0; t < 50; ++t) {
        RootSet r;
        for (int i = 0; i < 5; ++i) r.inner.push_back(std::polar(0.5 + 0.1 * i, u(rng)));
        const double guess = u(rng);
        const double delta = u(rng);
        RootSet rotated = r;
        for (auto& z : rotated.inner) z *= std::polar(1.0, delta);
        const double a = ricer::select_root(r, guess);
        const double b = ricer::select_root(rotated, guess + delta);
        CHECK(phase_distance(b, a + delta) < 1e-12);
    }
}

TEST_CASE("closest_to_circle") {
    RootSet rs;
    rs.inner = {std::polar(0.3, 1.0), std::polar(0.99, -0.4), std::polar(0.999, 2.0), std::polar(0.6, 0.0)};
    rs.roots = rs.inner;
    const auto w = ricer::closest_to_circle(rs, 2);
    REQUIRE(w.size() == 2);
    CHECK(std::abs(w[0] + 0.4) < 1e-14);
    CHECK(std::abs(w[1] - 2.0) < 1e-14);
}

TEST_CASE("pathloss_ls") {
    Rng rng(25);
    const ArrayGeometry g{3, 10, 10, 0.5};
    const TrainingSequence ts = training::build_training(g, 2, rng);
    const ComplexMatrix s = training::full_matrix(ts);
    SUBCASE("single path") {
        const MultipathParams p{{0.2}, {-0.7}, {1.9}, {cplx{0.3, -0.9}}};
        const ComplexMatrix y = channel::synth_channel(p, g) * s;
        const auto beta = ricer::pathloss_ls(y, s, p, g);
        CHECK(std::abs(beta[0] - p.beta[0]) < 1e-8);
    }
    SUBCASE("printed four-path scenario") {
        MultipathParams p = harness::paper_phases("fig2a");
        for (auto& b : p.beta) b = channel::rician_gain(10.0, 1.0, rng);
        const ComplexMatrix y = channel::synth_channel(p, g) * s;
        const auto beta = ricer::pathloss_ls(y, s, p, g);
        double worst = 0.0;
        for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(beta[k] - p.beta[k]) / std::abs(p.beta[k]));
        CHECK(worst < 1e-8);

        MultipathParams fit = p;
        fit.beta = beta;
        const ComplexMatrix resid = y - channel::synth_channel(fit, g) * s;
        CHECK(resid.norm() / y.norm() < 1e-10);
    }
    SUBCASE("coincident paths are rank deficient") {
        const MultipathParams p{{0.2, 0.2}, {0.5, 0.5}, {1.0, 1.0}, {1.0, 1.0}};
        const ComplexMatrix y = channel::synth_channel(p, g) * s;
        CHECK_THROWS(ricer::pathloss_ls(y, s, p, g));
    }
}

TEST_CASE("ricer_estimate, noiseless") {
    Rng rng(26);
    for (const auto& [m_r, l, k_max] : {std::tuple{3u, 2u, 4u}, std::tuple{4u, 2u, 8u}, std::tuple{4u, 3u, 9u}}) {
        const ArrayGeometry g{m_r, 10, 10, 0.5};
        for (std::size_t k = 1; k <= k_max; ++k) {
            CAPTURE(m_r);
            CAPTURE(k);
            const MultipathParams truth = channel::random_scenario(k, g, rng);
            const TrainingSequence ts = training::build_training(g, l, rng);
            const ComplexMatrix h = channel::synth_channel(truth, g);
            const ComplexMatrix y = h * training::full_matrix(ts);
            const RiceResult rice_r = rice::rice_estimate_full(y, k, ts, g);
            const MultipathParams refined = ricer::refine(rice_r, y, ts, g);
            const MultipathParams direct = ricer::ricer_estimate(y, k, ts, g);
            const PathMatch m = metrics::match_paths(refined, rice_r.params);
            CHECK(m.max_phase_error() < 1e-8);
            CHECK(metrics::match_paths(direct, refined).max_phase_error() == 0.0);
            CHECK(fddest::test::rel_err(rice::reconstruct_channel(refined, g), h) < 1e-6);
        }
    }
}

TEST_CASE("single receive antenna") {
    Rng rng(27);
    const ArrayGeometry g{1, 10, 10, 0.5};
    const TrainingSequence ts = training::build_training(g, 2, rng);
    const ComplexMatrix s = training::full_matrix(ts);
    for (std::size_t k = 1; k <= 3; ++k) {
        CAPTURE(k);
        MultipathParams truth = channel::random_scenario(k, g, rng);
        std::fill(truth.omega_r.begin(), truth.omega_r.end(), 0.0);
        const ComplexVector y = (channel::synth_channel(truth, g) * s).transpose();
        const MultipathParams est = ricer::single_antenna_estimate(y, k, ts);
        REQUIRE(est.k() == k);
        const PathMatch m = metrics::match_paths(est, truth);
        CHECK(m.max_phase_error() < 1e-6);
        CHECK(*std::max_element(m.gain_rel_errors.begin(), m.gain_rel_errors.end()) < 1e-6);
        for (double w : est.omega_r) CHECK(w == 0.0);
        const ComplexVector y_hat = (channel::synth_channel(est, g) * s).transpose();
        CHECK((y_hat - y).norm() / y.norm() < 1e-8);
    }
    const ComplexVector y = ComplexVector::Ones(16);
    CHECK_THROWS_AS(ricer::single_antenna_estimate(y, 4, ts), IdentifiabilityError);
}
