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

#include <vector>

#include "fddest/rice.hpp"

namespace fddest {

/// Roots of a conjugate-symmetric polynomial; `inner` holds the half with the
/// smaller moduli (one root from each conjugate-reciprocal pair).
struct RootSet {
    std::vector<cplx> roots;
    std::vector<cplx> inner;
};

namespace ricer {

/// S (I - c c^H / ||c||^2) S^H.
ComplexMatrix projector(const ComplexVector& c, const ComplexMatrix& s);

/// S (I - U U^H) S^H for an orthonormal basis U.
ComplexMatrix subspace_projector(const ComplexMatrix& u, const ComplexMatrix& s);

/// Coefficients (ascending powers of z) of z^(M-1) a(z)^H P a(z), where a(z)
/// has entries z^m. Entry i collects the diagonal of P with column minus row
/// equal to i - (M - 1). Length 2M - 1.
ComplexVector poly_coeffs(const ComplexMatrix& p);

/// Evaluates sum_i coeffs[i] z^(i - (M - 1)); at z = exp(j omega) this is a^H P a.
cplx eval_laurent(const ComplexVector& coeffs, cplx z);

/// Companion-matrix roots. Leading coefficients at or below 1e-14 of the
/// largest magnitude are trimmed first.
RootSet roots_inside(const ComplexVector& coeffs);

/// Phase of the inner root closest (circularly) to omega_guess; ties go to the
/// root of larger modulus.
double select_root(const RootSet& rs, double omega_guess);

/// Phases of the k roots closest to the unit circle, skipping roots whose
/// phase coincides with one already taken (the reciprocal partner).
std::vector<double> closest_to_circle(const RootSet& rs, std::size_t k);

/// Minimizer of a^H P a over a uniform grid on [-pi, pi). Validation oracle.
double grid_search_phase(const ComplexMatrix& p, std::size_t points = 10000);

/// Least-squares gains for known phases: vec(Y) = ((S^T conj(A_y kr A_x)) kr A_r) beta.
std::vector<cplx> pathloss_ls(const ComplexMatrix& y, const ComplexMatrix& s_full, const MultipathParams& omegas,
                              const ArrayGeometry& geom);

/// Root-based DOD refinement of a finished RICE run.
MultipathParams refine(const RiceResult& rice_result, const ComplexMatrix& y, const TrainingSequence& ts,
                       const ArrayGeometry& geom);

MultipathParams ricer_estimate(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                               const ArrayGeometry& geom);

/// Single receive antenna: y holds the N_x N_y received samples. Requires
/// K < min(N_x, N_y). Returned omega_r entries are zero.
MultipathParams single_antenna_estimate(const ComplexVector& y, std::size_t k, const TrainingSequence& ts);

}  // namespace ricer
}  // namespace fddest
