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

#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fddest/mdalg.hpp"

namespace fddest {

using Rng = std::mt19937_64;

/// Receive ULA with m_r elements and an m_x x m_y transmit URA; spacing_ratio
/// is element spacing over wavelength.
struct ArrayGeometry {
    std::size_t m_r = 1;
    std::size_t m_x = 1;
    std::size_t m_y = 1;
    double spacing_ratio = 0.5;

    std::size_t m_t() const { return m_x * m_y; }
    /// Throws std::invalid_argument on zero counts or spacing outside (0, 0.5].
    void validate() const;
};

/// Latent channel parameters: per-path spatial phases (radians) and complex gains.
struct MultipathParams {
    std::vector<double> omega_r;
    std::vector<double> omega_x;
    std::vector<double> omega_y;
    std::vector<cplx> beta;

    std::size_t k() const { return beta.size(); }
    void validate() const;
    /// Smallest wrapped pairwise distance within each phase list is at least min_sep.
    bool phases_distinct(double min_sep) const;
};

struct Scenario {
    ArrayGeometry geometry;
    MultipathParams params;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
};

/// Wraps a phase into (-pi, pi].
double wrap_phase(double omega);

/// |wrap(a - b)|, the circular distance between two phases.
double phase_distance(double a, double b);

namespace channel {

ComplexVector steering_ula(double omega, std::size_t m);

/// a_y (x) a_x; entry l_y * m_x + l_x is exp(j (l_x omega_x + l_y omega_y)).
ComplexVector steering_ura(double omega_x, double omega_y, const ArrayGeometry& geom);

/// Columns steering_ula(omegas[k], m).
ComplexMatrix steering_matrix(const std::vector<double>& omegas, std::size_t m);

/// H = A_r diag(beta) A_t^H, M_r x M_t.
ComplexMatrix synth_channel(const MultipathParams& params, const ArrayGeometry& geom);

/// Per-entry noise variance giving ||HS||_F^2 / (M_r N sigma^2) = 10^(snr_db/10).
double noise_variance(const ComplexMatrix& hs, double snr_db);

/// Draws sigma^2-variance circularly symmetric Gaussian entries.
ComplexMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng);

/// Y = H S + N. An infinite snr_db disables the noise.
enum class SnrReference {
    received,    // mean power of the noiseless received entries HS
    per_antenna  // mean power of the channel entries H
};

ComplexMatrix received(const ComplexMatrix& h, const ComplexMatrix& s, double snr_db, Rng& rng,
                       SnrReference ref = SnrReference::received);

struct PhaseRange {
    double lo;
    double hi;
};

enum class PhaseMode { grid, random };

struct ScenarioOptions {
    PhaseMode mode = PhaseMode::random;
    PhaseRange range_r{0.4 * std::numbers::pi, 1.6 * std::numbers::pi};
    PhaseRange range_x{0.4 * std::numbers::pi, 1.8 * std::numbers::pi};
    PhaseRange range_y{0.2 * std::numbers::pi, 1.6 * std::numbers::pi};
    double min_sep = 0.05;
    double rician_k_db = 10.0;
    double mean_power = 1.0;
};

/// K evenly spaced points over the range, both endpoints included; a single
/// point sits at the range midpoint.
std::vector<double> grid_phases(std::size_t k, PhaseRange range);

/// Rician magnitude, uniform phase.
cplx rician_gain(double k_factor_db, double mean_power, Rng& rng);

/// Grid mode uses grid_phases over each range (wrapped into (-pi, pi]);
/// random mode draws each list uniformly on (-pi, pi] with pairwise wrapped
/// separation >= min_sep. Throws std::invalid_argument when infeasible.
MultipathParams random_scenario(std::size_t k, const ArrayGeometry& geom, Rng& rng,
                                const ScenarioOptions& opts = {});

struct PathAngles {
    double theta_r;  // DOA
    double theta_t;  // DOD azimuth
    double phi_t;    // DOD elevation
};

std::vector<PathAngles> phases_to_angles(const MultipathParams& params, double spacing_ratio);

/// Inverse of phases_to_angles; gains are set to one.
MultipathParams angles_to_phases(const std::vector<PathAngles>& angles, double spacing_ratio);

}  // namespace channel
}  // namespace fddest
