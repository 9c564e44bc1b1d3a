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

#include "fddest/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fddest {

namespace {
constexpr double pi = std::numbers::pi;

double cell_center(double lo, double hi, std::size_t i, std::size_t n) {
    return lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(n);
}
}  // namespace

double AngleGrid::theta_r(std::size_t i) const { return cell_center(-pi / 2, pi / 2, i, size_r()); }
double AngleGrid::theta_t(std::size_t i) const { return cell_center(-pi, pi, i, size_t_()); }
double AngleGrid::phi_t(std::size_t i) const { return cell_center(0.0, pi / 2, i, size_p()); }

namespace baselines {

MultipathParams omp_estimate(const ComplexMatrix& y, const ComplexMatrix& s_full, const ArrayGeometry& geom,
                             const AngleGrid& grid, std::size_t k, std::vector<double>* residual_norms) {
    if (k == 0) {
        throw std::invalid_argument("omp_estimate: k must be positive");
    }
    geom.validate();
    if (static_cast<std::size_t>(y.rows()) != geom.m_r || y.cols() != s_full.cols() ||
        static_cast<std::size_t>(s_full.rows()) != geom.m_t()) {
        throw std::invalid_argument("omp_estimate: dimension mismatch between Y, S and the array");
    }
    const double scale = 2.0 * pi * geom.spacing_ratio;
    const std::size_t g_r = grid.size_r();
    const std::size_t g_t = grid.size_t_() * grid.size_p();

    // Receive atoms and the training-projected transmit atoms S^H a_t.
    ComplexMatrix rx(static_cast<Eigen::Index>(geom.m_r), static_cast<Eigen::Index>(g_r));
    std::vector<double> omega_r(g_r);
    for (std::size_t i = 0; i < g_r; ++i) {
        omega_r[i] = scale * std::sin(grid.theta_r(i));
        rx.col(static_cast<Eigen::Index>(i)) = channel::steering_ula(omega_r[i], geom.m_r);
    }
    ComplexMatrix tx(static_cast<Eigen::Index>(geom.m_t()), static_cast<Eigen::Index>(g_t));
    std::vector<double> omega_x(g_t), omega_y(g_t);
    for (std::size_t it = 0; it < grid.size_t_(); ++it) {
        for (std::size_t ip = 0; ip < grid.size_p(); ++ip) {
            const std::size_t g = it * grid.size_p() + ip;
            omega_x[g] = scale * std::sin(grid.phi_t(ip)) * std::cos(grid.theta_t(it));
            omega_y[g] = scale * std::sin(grid.phi_t(ip)) * std::sin(grid.theta_t(it));
            tx.col(static_cast<Eigen::Index>(g)) = channel::steering_ura(omega_x[g], omega_y[g], geom);
        }
    }
    const ComplexMatrix projected = s_full.adjoint() * tx;  // N x G_t
    const Eigen::VectorXd tx_norm = projected.colwise().norm().transpose();
    const double rx_norm = std::sqrt(static_cast<double>(geom.m_r));

    const ComplexVector target = y.reshaped();
    ComplexVector residual = target;
    std::vector<std::pair<std::size_t, std::size_t>> support;
    ComplexMatrix design(target.size(), 0);
    ComplexVector beta;
    const Eigen::Index m_r = y.rows();
    const Eigen::Index n = y.cols();

    for (std::size_t iter = 0; iter < k; ++iter) {
        const ComplexMatrix r_mat = residual.reshaped(m_r, n);
        const ComplexMatrix corr = rx.adjoint() * (r_mat * projected);  // G_r x G_t
        double best = -1.0;
        std::pair<std::size_t, std::size_t> pick{0, 0};
        for (Eigen::Index t = 0; t < corr.cols(); ++t) {
            if (!(tx_norm(t) > 1e-12)) {
                continue;
            }
            for (Eigen::Index r = 0; r < corr.rows(); ++r) {
                const double score = std::abs(corr(r, t)) / (rx_norm * tx_norm(t));
                if (score > best) {
                    best = score;
                    pick = {static_cast<std::size_t>(r), static_cast<std::size_t>(t)};
                }
            }
        }
        support.push_back(pick);
        design.conservativeResize(Eigen::NoChange, design.cols() + 1);
        const ComplexMatrix atom = rx.col(static_cast<Eigen::Index>(pick.first)) *
                                   projected.col(static_cast<Eigen::Index>(pick.second)).adjoint();
        design.col(design.cols() - 1) = atom.reshaped();
        beta = design.colPivHouseholderQr().solve(target);
        residual = target - design * beta;
        if (residual_norms != nullptr) {
            residual_norms->push_back(residual.norm());
        }
    }

    MultipathParams out;
    for (std::size_t i = 0; i < support.size(); ++i) {
        out.omega_r.push_back(omega_r[support[i].first]);
        out.omega_x.push_back(omega_x[support[i].second]);
        out.omega_y.push_back(omega_y[support[i].second]);
        out.beta.push_back(beta(static_cast<Eigen::Index>(i)));
    }
    return out;
}

double ls_benchmark_nmse(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

ComplexMatrix orthogonal_training(std::size_t m_t) {
    const auto n = static_cast<Eigen::Index>(m_t);
    ComplexMatrix f(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m_t));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            f(i, j) = std::polar(norm, -2.0 * pi * static_cast<double>((i * j) % n) / static_cast<double>(n));
        }
    }
    return f;
}

ComplexMatrix ls_orthogonal_estimate(const ComplexMatrix& y_orth, const ComplexMatrix& s_orth) {
    const ComplexMatrix gram = s_orth * s_orth.adjoint();
    if (gram.rows() != gram.cols() ||
        (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("ls_orthogonal_estimate: training is not orthogonal");
    }
    if (y_orth.cols() != s_orth.cols()) {
        throw std::invalid_argument("ls_orthogonal_estimate: Y and S sample counts differ");
    }
    return y_orth * s_orth.adjoint();
}

}  // namespace baselines
}  // namespace fddest
