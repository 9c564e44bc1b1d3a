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

#include <cstddef>
#include <vector>

#include "fddest/channel.hpp"

namespace fddest {

/// Uniform quantization of (theta_r, theta_t, phi_t) over
/// (-pi/2, pi/2) x (-pi, pi) x (0, pi/2); grid points sit at cell centers.
struct AngleGrid {
    unsigned bits_r = 5;
    unsigned bits_t = 5;
    unsigned bits_p = 5;

    std::size_t size_r() const { return std::size_t{1} << bits_r; }
    std::size_t size_t_() const { return std::size_t{1} << bits_t; }
    std::size_t size_p() const { return std::size_t{1} << bits_p; }
    std::size_t atoms() const { return size_r() * size_t_() * size_p(); }

    double theta_r(std::size_t i) const;
    double theta_t(std::size_t i) const;
    double phi_t(std::size_t i) const;
};

namespace baselines {

/// Greedy OMP over the angle dictionary with atoms vec(a_r a_t^H S): K
/// selections by normalized correlation, full least-squares refit after each.
/// residual_norms (optional) receives ||r|| after every iteration.
MultipathParams omp_estimate(const ComplexMatrix& y, const ComplexMatrix& s_full, const ArrayGeometry& geom,
                             const AngleGrid& grid, std::size_t k, std::vector<double>* residual_norms = nullptr);

/// 10^(-snr_db / 10).
double ls_benchmark_nmse(double snr_db);

/// Unitary DFT training, M_t x M_t.
ComplexMatrix orthogonal_training(std::size_t m_t);

/// Matched filter Y S^H; requires S S^H = I to within 1e-10.
ComplexMatrix ls_orthogonal_estimate(const ComplexMatrix& y_orth, const ComplexMatrix& s_orth);

}  // namespace baselines
}  // namespace fddest
