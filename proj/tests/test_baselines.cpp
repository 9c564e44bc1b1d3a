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

#include <limits>
#include <numbers>

#include "fddest/baselines.hpp"
#include "fddest/metrics.hpp"
#include "fddest/training.hpp"
#include "test_util.hpp"

using namespace fddest;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double kNoiseless = std::numeric_limits<double>::infinity();

MultipathParams on_grid(const AngleGrid& g, const std::vector<std::array<std::size_t, 3>>& cells,
                        const std::vector<cplx>& beta) {
    std::vector<channel::PathAngles> angles;
    for (const auto& [ir, it, ip] : cells) angles.push_back({g.theta_r(ir), g.theta_t(it), g.phi_t(ip)});
    MultipathParams p = channel::angles_to_phases(angles, 0.5);
    p.beta = beta;
    return p;
}

double mean_ls_nmse(const MultipathParams& p, const ArrayGeometry& geom, std::size_t trials, Rng& rng) {
    const ComplexMatrix h = channel::synth_channel(p, geom);
    const ComplexMatrix s = baselines::orthogonal_training(geom.m_t());
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ComplexMatrix y = channel::received(h, s, 10.0, rng);
        sum += metrics::nmse(baselines::ls_orthogonal_estimate(y, s), h);
    }
    return sum / static_cast<double>(trials);
}
}  // namespace

TEST_CASE("angle grid") {
    const AngleGrid seven{7, 7, 7};
    CHECK(seven.atoms() == (std::size_t{1} << 21));
    const AngleGrid g{};
    CHECK(g.atoms() == 32768);
    CHECK(g.theta_r(0) == doctest::Approx(-pi / 2 + pi / 64));
    CHECK(g.theta_t(31) == doctest::Approx(pi - pi / 32));
    CHECK(g.phi_t(0) == doctest::Approx(pi / 128));
}

TEST_CASE("omp on-grid recovery") {
    Rng rng(31);
    const ArrayGeometry geom{4, 6, 6, 0.5};
    const TrainingSequence ts = training::build_training(geom, 2, rng);
    const ComplexMatrix s = training::full_matrix(ts);
    const AngleGrid grid{4, 4, 4};

    SUBCASE("single path") {
        const MultipathParams p = on_grid(grid, {{5, 3, 9}}, {cplx{0.7, -0.2}});
        const ComplexMatrix y = channel::synth_channel(p, geom) * s;
        std::vector<double> res;
        const MultipathParams est = baselines::omp_estimate(y, s, geom, grid, 1, &res);
        CHECK(est.omega_r[0] == doctest::Approx(p.omega_r[0]).epsilon(1e-12));
        CHECK(est.omega_x[0] == doctest::Approx(p.omega_x[0]).epsilon(1e-12));
        CHECK(est.omega_y[0] == doctest::Approx(p.omega_y[0]).epsilon(1e-12));
        CHECK(std::abs(est.beta[0] - p.beta[0]) < 1e-8);
        CHECK(res.back() < 1e-8 * y.norm());
    }
    SUBCASE("two separated paths") {
        const MultipathParams p = on_grid(grid, {{3, 2, 12}, {11, 9, 6}}, {cplx{1.0, 0.0}, cplx{-0.4, 0.6}});
        const ComplexMatrix y = channel::synth_channel(p, geom) * s;
        std::vector<double> res;
        const MultipathParams est = baselines::omp_estimate(y, s, geom, grid, 2, &res);
        const PathMatch m = metrics::match_paths(est, p);
        CHECK(m.max_phase_error() < 1e-12);
        CHECK(*std::max_element(m.gain_rel_errors.begin(), m.gain_rel_errors.end()) < 1e-8);
        REQUIRE(res.size() == 2);
        CHECK(res[1] <= res[0]);
        CHECK(res[1] < 1e-8 * y.norm());
    }
    SUBCASE("noisy residuals never increase") {
        const MultipathParams p = channel::random_scenario(4, geom, rng);
        const ComplexMatrix y = channel::received(channel::synth_channel(p, geom), s, 10.0, rng);
        std::vector<double> res;
        const MultipathParams est = baselines::omp_estimate(y, s, geom, grid, 4, &res);
        CHECK(est.k() == 4);
        REQUIRE(res.size() == 4);
        for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i] <= res[i - 1] * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(baselines::omp_estimate(ComplexMatrix::Zero(4, 16), s, geom, grid, 0), std::invalid_argument);
    CHECK_THROWS_AS(baselines::omp_estimate(ComplexMatrix::Zero(3, 16), s, geom, grid, 1), std::invalid_argument);
}

TEST_CASE("ls benchmark") {
    CHECK(baselines::ls_benchmark_nmse(0.0) == 1.0);
    CHECK(baselines::ls_benchmark_nmse(10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(baselines::ls_benchmark_nmse(20.0) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("orthogonal least squares") {
    Rng rng(32);
    const ArrayGeometry geom{4, 4, 4, 0.5};
    const ComplexMatrix s = baselines::orthogonal_training(16);
    CHECK((s * s.adjoint() - ComplexMatrix::Identity(16, 16)).norm() < 1e-12);

    const MultipathParams p = channel::random_scenario(3, geom, rng);
    const ComplexMatrix h = channel::synth_channel(p, geom);
    const ComplexMatrix y = channel::received(h, s, kNoiseless, rng);
    CHECK(fddest::test::max_abs(baselines::ls_orthogonal_estimate(y, s) - h) < 1e-12);

    const ComplexMatrix eye = ComplexMatrix::Identity(16, 16);
    const ComplexMatrix y2 = fddest::test::random_matrix(4, 16, rng);
    CHECK(baselines::ls_orthogonal_estimate(y2, eye) == y2);

    ComplexMatrix bent = s;
    bent(0, 0) *= 1.01;
    CHECK_THROWS_AS(baselines::ls_orthogonal_estimate(y, bent), std::invalid_argument);
}

TEST_CASE("orthogonal least squares NMSE matches the benchmark") {
    Rng rng(33);
    const ArrayGeometry geom{4, 10, 10, 0.5};
    const MultipathParams p = channel::random_scenario(4, geom, rng);
    CHECK(std::abs(mean_ls_nmse(p, geom, 500, rng) - 0.1) < 0.015);

    // Same statistics for very different channels.
    MultipathParams strong = channel::random_scenario(1, geom, rng);
    strong.beta[0] = 40.0;
    const MultipathParams rich = channel::random_scenario(8, geom, rng);
    for (const MultipathParams* q : {&p, static_cast<const MultipathParams*>(&strong), &rich}) {
        CHECK(std::abs(mean_ls_nmse(*q, geom, 300, rng) - 0.1) < 0.01);
    }
}
