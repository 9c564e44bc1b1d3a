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

#include "fddest/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fddest {

namespace {
constexpr double pi = std::numbers::pi;
}

void ArrayGeometry::validate() const {
    if (m_r == 0 || m_x == 0 || m_y == 0) {
        throw std::invalid_argument("ArrayGeometry: antenna counts must be positive");
    }
    if (!(spacing_ratio > 0.0 && spacing_ratio <= 0.5)) {
        throw std::invalid_argument("ArrayGeometry: spacing ratio must lie in (0, 0.5]");
    }
}

void MultipathParams::validate() const {
    const std::size_t k = beta.size();
    if (k == 0) {
        throw std::invalid_argument("MultipathParams: at least one path required");
    }
    if (omega_r.size() != k || omega_x.size() != k || omega_y.size() != k) {
        throw std::invalid_argument("MultipathParams: phase and gain lists differ in length");
    }
}

bool MultipathParams::phases_distinct(double min_sep) const {
    for (const auto* list : {&omega_r, &omega_x, &omega_y}) {
        for (std::size_t i = 0; i < list->size(); ++i) {
            for (std::size_t j = i + 1; j < list->size(); ++j) {
                if (phase_distance((*list)[i], (*list)[j]) < min_sep) {
                    return false;
                }
            }
        }
    }
    return true;
}

double wrap_phase(double omega) {
    double w = std::remainder(omega, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

namespace channel {

ComplexVector steering_ula(double omega, std::size_t m) {
    ComplexVector a(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        a(static_cast<Eigen::Index>(i)) = std::polar(1.0, static_cast<double>(i) * omega);
    }
    return a;
}

ComplexVector steering_ura(double omega_x, double omega_y, const ArrayGeometry& geom) {
    return mdalg::kron(steering_ula(omega_y, geom.m_y), steering_ula(omega_x, geom.m_x));
}

ComplexMatrix steering_matrix(const std::vector<double>& omegas, std::size_t m) {
    ComplexMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(omegas.size()));
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)) = steering_ula(omegas[k], m);
    }
    return a;
}

ComplexMatrix synth_channel(const MultipathParams& params, const ArrayGeometry& geom) {
    params.validate();
    ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(geom.m_r), static_cast<Eigen::Index>(geom.m_t()));
    for (std::size_t k = 0; k < params.k(); ++k) {
        const ComplexVector a_r = steering_ula(params.omega_r[k], geom.m_r);
        const ComplexVector a_t = steering_ura(params.omega_x[k], params.omega_y[k], geom);
        h.noalias() += params.beta[k] * a_r * a_t.adjoint();
    }
    return h;
}

double noise_variance(const ComplexMatrix& hs, double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) {
        return 0.0;
    }
    const double signal = hs.squaredNorm() / static_cast<double>(hs.size());
    return signal * std::pow(10.0, -snr_db / 10.0);
}

ComplexMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    ComplexMatrix n(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            n(i, j) = {re, im};
        }
    }
    return n;
}

ComplexMatrix received(const ComplexMatrix& h, const ComplexMatrix& s, double snr_db, Rng& rng, SnrReference ref) {
    if (h.cols() != s.rows()) {
        throw std::invalid_argument("received: H has " + std::to_string(h.cols()) + " columns but S has " +
                                    std::to_string(s.rows()) + " rows");
    }
    ComplexMatrix y = h * s;
    const double var = ref == SnrReference::received ? noise_variance(y, snr_db) : noise_variance(h, snr_db);
    if (var > 0.0) {
        y += complex_gaussian(y.rows(), y.cols(), var, rng);
    }
    return y;
}

std::vector<double> grid_phases(std::size_t k, PhaseRange range) {
    std::vector<double> out(k);
    if (k == 1) {
        out[0] = 0.5 * (range.lo + range.hi);
        return out;
    }
    const double step = (range.hi - range.lo) / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = range.lo + static_cast<double>(i) * step;
    }
    return out;
}

cplx rician_gain(double k_factor_db, double mean_power, Rng& rng) {
    const double kappa = std::pow(10.0, k_factor_db / 10.0);
    const double los = std::sqrt(kappa / (kappa + 1.0) * mean_power);
    const double scatter_sd = std::sqrt(mean_power / (kappa + 1.0) / 2.0);
    std::normal_distribution<double> gauss(0.0, scatter_sd);
    std::uniform_real_distribution<double> phase(-pi, pi);
    const double re = los + gauss(rng);
    const double im = gauss(rng);
    return std::polar(std::hypot(re, im), phase(rng));
}

namespace {

std::vector<double> separated_uniform(std::size_t k, double min_sep, Rng& rng) {
    if (static_cast<double>(k) * min_sep > 2.0 * pi) {
        throw std::invalid_argument("random_scenario: " + std::to_string(k) + " phases cannot be " +
                                    std::to_string(min_sep) + " rad apart");
    }
    std::uniform_real_distribution<double> uni(-pi, pi);
    constexpr int max_attempts = 100000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> out;
        out.reserve(k);
        for (int draw = 0; draw < 1000 && out.size() < k; ++draw) {
            const double w = wrap_phase(uni(rng));
            const bool ok = std::all_of(out.begin(), out.end(),
                                        [&](double o) { return phase_distance(o, w) >= min_sep; });
            if (ok) {
                out.push_back(w);
            }
        }
        if (out.size() == k) {
            return out;
        }
    }
    throw std::invalid_argument("random_scenario: could not place phases with the requested separation");
}

}  // namespace

MultipathParams random_scenario(std::size_t k, const ArrayGeometry& geom, Rng& rng, const ScenarioOptions& opts) {
    geom.validate();
    if (k == 0) {
        throw std::invalid_argument("random_scenario: k must be positive");
    }
    MultipathParams p;
    if (opts.mode == PhaseMode::grid) {
        auto wrapped = [](std::vector<double> v) {
            for (double& w : v) {
                w = wrap_phase(w);
            }
            return v;
        };
        p.omega_r = wrapped(grid_phases(k, opts.range_r));
        p.omega_x = wrapped(grid_phases(k, opts.range_x));
        p.omega_y = wrapped(grid_phases(k, opts.range_y));
        if (!p.phases_distinct(opts.min_sep)) {
            throw std::invalid_argument("random_scenario: grid phases violate the minimum separation");
        }
    } else {
        p.omega_r = separated_uniform(k, opts.min_sep, rng);
        p.omega_x = separated_uniform(k, opts.min_sep, rng);
        p.omega_y = separated_uniform(k, opts.min_sep, rng);
    }
    p.beta.resize(k);
    for (auto& b : p.beta) {
        b = rician_gain(opts.rician_k_db, opts.mean_power, rng);
    }
    return p;
}

namespace {

double checked_asin(double x, const char* what) {
    constexpr double slack = 1e-12;
    if (std::abs(x) > 1.0 + slack) {
        throw std::domain_error(std::string("phases_to_angles: ") + what + " phase outside the visible region");
    }
    return std::asin(std::clamp(x, -1.0, 1.0));
}

}  // namespace

std::vector<PathAngles> phases_to_angles(const MultipathParams& params, double spacing_ratio) {
    params.validate();
    const double scale = 1.0 / (2.0 * pi * spacing_ratio);
    std::vector<PathAngles> out(params.k());
    for (std::size_t k = 0; k < params.k(); ++k) {
        const double wr = wrap_phase(params.omega_r[k]);
        const double wx = wrap_phase(params.omega_x[k]);
        const double wy = wrap_phase(params.omega_y[k]);
        out[k].theta_r = checked_asin(scale * wr, "receive");
        out[k].theta_t = std::atan2(wy, wx);
        out[k].phi_t = checked_asin(scale * std::hypot(wx, wy), "transmit");
    }
    return out;
}

MultipathParams angles_to_phases(const std::vector<PathAngles>& angles, double spacing_ratio) {
    const double scale = 2.0 * pi * spacing_ratio;
    MultipathParams p;
    for (const auto& a : angles) {
        p.omega_r.push_back(scale * std::sin(a.theta_r));
        p.omega_x.push_back(scale * std::sin(a.phi_t) * std::cos(a.theta_t));
        p.omega_y.push_back(scale * std::sin(a.phi_t) * std::sin(a.theta_t));
        p.beta.emplace_back(1.0, 0.0);
    }
    return p;
}

}  // namespace channel
}  // namespace fddest
