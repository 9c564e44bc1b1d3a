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

#include "fddest/metrics.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fddest {

double PathMatch::max_phase_error() const {
    double worst = 0.0;
    for (const auto& e : phase_errors) {
        worst = std::max({worst, e[0], e[1], e[2]});
    }
    return worst;
}

double PathMatch::mean_phase_error() const {
    if (phase_errors.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& e : phase_errors) {
        sum += e[0] + e[1] + e[2];
    }
    return sum / (3.0 * static_cast<double>(phase_errors.size()));
}

namespace metrics {

double nmse(const ComplexMatrix& h_hat, const ComplexMatrix& h) {
    if (h_hat.rows() != h.rows() || h_hat.cols() != h.cols()) {
        throw std::invalid_argument("nmse: dimension mismatch");
    }
    const double ref = h.squaredNorm();
    if (!(ref > 0.0)) {
        throw std::invalid_argument("nmse: true channel is zero");
    }
    return (h_hat - h).squaredNorm() / ref;
}

PathMatch match_paths(const MultipathParams& est, const MultipathParams& truth) {
    const std::size_t k = truth.k();
    if (est.k() != k) {
        throw std::invalid_argument("match_paths: path counts differ");
    }
    if (k > 20) {
        throw std::invalid_argument("match_paths: too many paths for exact matching");
    }
    auto cost = [&](std::size_t t, std::size_t e) {
        return phase_distance(est.omega_r[e], truth.omega_r[t]) + phase_distance(est.omega_x[e], truth.omega_x[t]) +
               phase_distance(est.omega_y[e], truth.omega_y[t]);
    };
    // best[mask]: cheapest assignment of the first popcount(mask) truths onto the estimates in mask.
    const std::size_t states = std::size_t{1} << k;
    std::vector<double> best(states, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> choice(states, 0);
    best[0] = 0.0;
    for (std::size_t mask = 0; mask < states; ++mask) {
        if (best[mask] == std::numeric_limits<double>::infinity()) {
            continue;
        }
        const auto t = static_cast<std::size_t>(std::popcount(mask));
        if (t == k) {
            continue;
        }
        for (std::size_t e = 0; e < k; ++e) {
            if ((mask >> e) & 1U) {
                continue;
            }
            const std::size_t next = mask | (std::size_t{1} << e);
            const double c = best[mask] + cost(t, e);
            if (c < best[next]) {
                best[next] = c;
                choice[next] = e;
            }
        }
    }
    PathMatch m;
    m.est_of_truth.assign(k, 0);
    std::size_t mask = states - 1;
    for (std::size_t t = k; t-- > 0;) {
        const std::size_t e = choice[mask];
        m.est_of_truth[t] = e;
        mask &= ~(std::size_t{1} << e);
    }
    m.total_cost = best[states - 1];
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t e = m.est_of_truth[t];
        m.phase_errors.push_back({phase_distance(est.omega_r[e], truth.omega_r[t]),
                                  phase_distance(est.omega_x[e], truth.omega_x[t]),
                                  phase_distance(est.omega_y[e], truth.omega_y[t])});
        m.gain_rel_errors.push_back(std::abs(est.beta[e] - truth.beta[t]) / std::abs(truth.beta[t]));
    }
    return m;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace metrics
}  // namespace fddest
