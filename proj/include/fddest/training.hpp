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

#include <string>

#include "fddest/channel.hpp"

namespace fddest {

enum class Axis { x, y };

enum class SymbolSharing {
    shared,      // one pool of max(M_x, M_y) symbols, shorter axis uses a shifted window
    independent  // separate draws per axis, only the normalization entries are coupled
};

/// Conjugate-flipped training pair. Each S_i = [S_bar_i | S_under_i] is
/// M_i x 2L. Column j < L of S_bar_i is s_bar_{L-j}, which carries the first
/// M_i + 1 - (L - j) window symbols followed by zeros; column L + j of
/// S_under_i is the conjugated flip of the nonzero part of s_bar_{L-j}.
struct TrainingSequence {
    ComplexMatrix s_x;
    ComplexMatrix s_y;
    std::size_t l = 0;
    ComplexVector base_symbols;
    ComplexVector window_x;  // symbols feeding s_bar_{x,1}, length M_x
    ComplexVector window_y;  // symbols feeding s_bar_{y,1}, length M_y

    std::size_t n_x() const { return 2 * l; }
    std::size_t n_y() const { return 2 * l; }
    std::size_t m_x() const { return static_cast<std::size_t>(s_x.rows()); }
    std::size_t m_y() const { return static_cast<std::size_t>(s_y.rows()); }
    const ComplexMatrix& axis(Axis a) const { return a == Axis::x ? s_x : s_y; }
};

namespace training {

/// Builds S_x and S_y with unit-modulus random symbols and the normalization
/// [s_bar_{x,1}]_{M_x} [s_bar_{y,1}]_{M_y} = 1. Requires l >= 2 and
/// M_x, M_y >= l + 1.
TrainingSequence build_training(const ArrayGeometry& geom, std::size_t l, Rng& rng,
                                SymbolSharing sharing = SymbolSharing::shared);

/// Assembles one axis from its symbol window (length M).
ComplexMatrix conjugate_flipped(const ComplexVector& window, std::size_t l);

/// S = S_y (x) S_x.
ComplexMatrix full_matrix(const TrainingSequence& ts);

/// Checks every structural invariant; throws std::invalid_argument with the
/// first violation found.
void validate(const TrainingSequence& ts, double tol = 1e-12);

/// [s_bar_{x,1}]_{M_x} [s_bar_{y,1}]_{M_y}; one for a valid sequence.
cplx normalization_product(const TrainingSequence& ts);

/// max_l | s_under_l^H a - conj(s_bar_l^H a) a_{M+1-l} | for a = a(omega).
double cri_check(const TrainingSequence& ts, double omega, Axis axis);

/// Smallest |s_bar_l^H a| over all paths, both axes and l = 1..L. The CRI
/// phase estimate divides by these inner products.
double min_overline_response(const TrainingSequence& ts, const MultipathParams& params);

/// JSON document with complex entries stored as [re, im] pairs.
std::string to_json(const TrainingSequence& ts);
TrainingSequence from_json(const std::string& text);

}  // namespace training
}  // namespace fddest
