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

#include <stdexcept>
#include <vector>

#include "fddest/training.hpp"

namespace fddest {

/// Raised when the requested path count exceeds what the smoothing plan can
/// identify, or the data does not carry K significant components.
class IdentifiabilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an estimator hits a degenerate intermediate quantity.
class NumericalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SmoothingPlan {
    std::size_t p_r = 0;
    std::size_t q_r = 0;
    std::size_t k_max = 0;
};

/// Factors of Y = B_r (C_y kr C_x)^H, each column known up to a joint
/// permutation and per-factor scaling.
struct FactorEstimate {
    ComplexMatrix b_r;  // M_r x K
    ComplexMatrix c_x;  // N_x x K
    ComplexMatrix c_y;  // N_y x K
};

struct CriPhases {
    std::vector<double> omega;
    std::vector<bool> flagged;  // some |c_bar| entry fell below the relative floor
};

enum class GainAveraging { forward, backward, both };

struct RiceResult {
    SmoothingPlan plan;
    FactorEstimate factors;
    MultipathParams params;
    std::vector<bool> flagged;
};

namespace rice {

/// Maximizes min((P_r - 1) N_x, Q_r N_y) over P_r + Q_r = M_r + 1, P_r >= 2.
/// Ties resolve to the smallest P_r.
SmoothingPlan plan_smoothing(std::size_t m_r, std::size_t n_x, std::size_t n_y);

/// Algebraic factorization through spatial smoothing and a shift-invariance
/// eigenproblem on the signal subspace.
FactorEstimate factor_estimate(const ComplexMatrix& y, std::size_t k, const SmoothingPlan& plan, std::size_t n_x,
                               std::size_t n_y);

/// Per-column receive phase from the lag-one inner product of each column.
std::vector<double> doa_phases(const ComplexMatrix& b_r);

/// Transmit phases from the conjugate rotational invariance between the two
/// halves of each column (first L rows vs last L rows).
CriPhases dod_phases_cri(const ComplexMatrix& c_hat, std::size_t l, double floor = 1e-6);

/// Path gains from the scaling ambiguities. omegas holds the estimated phases
/// (its gains are ignored). Symbol values are not needed: the normalization
/// constraint of the training cancels them.
std::vector<cplx> pathloss_rice(const FactorEstimate& factors, const MultipathParams& omegas,
                                const TrainingSequence& ts, GainAveraging mode = GainAveraging::both);

RiceResult rice_estimate_full(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                              const ArrayGeometry& geom);

/// Paths come back in the estimator's internal order.
MultipathParams rice_estimate(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                              const ArrayGeometry& geom);

ComplexMatrix reconstruct_channel(const MultipathParams& params, const ArrayGeometry& geom);

/// Reorders paths by ascending wrapped omega_r.
MultipathParams sorted_by_omega_r(const MultipathParams& params);

}  // namespace rice
}  // namespace fddest
