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

#include <array>
#include <vector>

#include "fddest/channel.hpp"

namespace fddest {

/// Bijection between estimated and true paths. est_of_truth[t] is the
/// estimated path matched to true path t.
struct PathMatch {
    std::vector<std::size_t> est_of_truth;
    std::vector<std::array<double, 3>> phase_errors;  // wrapped |error| of (omega_r, omega_x, omega_y)
    std::vector<double> gain_rel_errors;              // |beta_hat - beta| / |beta|
    double total_cost = 0.0;

    double max_phase_error() const;
    double mean_phase_error() const;
};

namespace metrics {

/// ||H_hat - H||_F^2 / ||H||_F^2. Throws on a zero true channel.
double nmse(const ComplexMatrix& h_hat, const ComplexMatrix& h);

/// Minimum total wrapped phase distance assignment (exact, subset DP).
PathMatch match_paths(const MultipathParams& est, const MultipathParams& truth);

/// Median of a copy; NaN for an empty input.
double median(std::vector<double> values);

double mean(const std::vector<double>& values);

}  // namespace metrics
}  // namespace fddest
