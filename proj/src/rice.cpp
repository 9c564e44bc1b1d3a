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

#include "fddest/rice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fddest::rice {

SmoothingPlan plan_smoothing(std::size_t m_r, std::size_t n_x, std::size_t n_y) {
    if (m_r < 2) {
        throw std::invalid_argument("plan_smoothing: needs at least two receive antennas");
    }
    SmoothingPlan best;
    for (std::size_t p = 2; p <= m_r; ++p) {
        const std::size_t q = m_r + 1 - p;
        const std::size_t bound = std::min((p - 1) * n_x, q * n_y);
        if (bound > best.k_max) {
            best = {p, q, bound};
        }
    }
    return best;
}

FactorEstimate factor_estimate(const ComplexMatrix& y, std::size_t k, const SmoothingPlan& plan, std::size_t n_x,
                               std::size_t n_y) {
    const auto m_r = static_cast<std::size_t>(y.rows());
    if (k == 0) {
        throw std::invalid_argument("factor_estimate: k must be positive");
    }
    if (k > plan.k_max) {
        throw IdentifiabilityError("factor_estimate: " + std::to_string(k) + " paths exceed the identifiable " +
                                   std::to_string(plan.k_max));
    }
    if (plan.p_r + plan.q_r != m_r + 1) {
        throw std::invalid_argument("factor_estimate: smoothing plan does not match M_r");
    }
    const ComplexMatrix y3 = mdalg::mode3_unfold(y, n_x, n_y);
    const ComplexMatrix z = mdalg::swap_row_blocks(mdalg::spatial_smooth(y3, plan.p_r, plan.q_r, n_x, m_r),
                                                   plan.p_r, n_x);
    const mdalg::TruncatedSvd svd = mdalg::truncated_svd(z, k);
    const auto kk = static_cast<Eigen::Index>(k);
    if (!(svd.sigma(0) > 0.0) || svd.sigma(kk - 1) < 1e-12 * svd.sigma(0)) {
        throw IdentifiabilityError("factor_estimate: smoothed data has fewer than K significant components");
    }

    // Shift invariance along the receive array: rows p = 0..P-2 vs p = 1..P-1.
    const auto shifted = static_cast<Eigen::Index>((plan.p_r - 1) * n_x);
    const auto nx = static_cast<Eigen::Index>(n_x);
    const ComplexMatrix u_first = svd.u.topRows(shifted);
    const ComplexMatrix u_second = svd.u.bottomRows(shifted);
    const ComplexMatrix phi = mdalg::pinv(u_first) * u_second;
    const mdalg::EigenPairs eig = mdalg::right_eigenvectors(phi);

    Eigen::PartialPivLU<ComplexMatrix> lu(eig.vectors);
    const ComplexMatrix gamma1 = svd.u * eig.vectors;
    const ComplexMatrix gamma2 =
        lu.solve(ComplexMatrix(svd.sigma.cast<cplx>().asDiagonal() * svd.v.adjoint())).transpose();
    if (!gamma1.allFinite() || !gamma2.allFinite()) {
        throw NumericalError("factor_estimate: eigenvector matrix is singular");
    }

    FactorEstimate f;
    f.c_x = gamma1.topRows(nx).conjugate();
    f.c_y = gamma2.topRows(static_cast<Eigen::Index>(n_y)).conjugate();
    const ComplexMatrix design = mdalg::khatri_rao(f.c_y.conjugate(), f.c_x.conjugate());
    f.b_r = (mdalg::pinv(design) * mdalg::mode1_unfold(y, n_x, n_y)).transpose();
    return f;
}

std::vector<double> doa_phases(const ComplexMatrix& b_r) {
    if (b_r.rows() < 2) {
        throw std::invalid_argument("doa_phases: needs at least two receive antennas");
    }
    const Eigen::Index m = b_r.rows();
    std::vector<double> out(static_cast<std::size_t>(b_r.cols()));
    for (Eigen::Index k = 0; k < b_r.cols(); ++k) {
        const cplx lag = b_r.col(k).head(m - 1).dot(b_r.col(k).tail(m - 1));
        if (lag == cplx{0.0, 0.0}) {
            throw NumericalError("doa_phases: column " + std::to_string(k) + " is zero");
        }
        out[static_cast<std::size_t>(k)] = std::arg(lag);
    }
    return out;
}

CriPhases dod_phases_cri(const ComplexMatrix& c_hat, std::size_t l, double floor) {
    const auto ll = static_cast<Eigen::Index>(l);
    if (l < 2 || c_hat.rows() != 2 * ll) {
        throw std::invalid_argument("dod_phases_cri: expected 2L rows with L >= 2");
    }
    CriPhases out;
    out.omega.resize(static_cast<std::size_t>(c_hat.cols()));
    out.flagged.assign(static_cast<std::size_t>(c_hat.cols()), false);
    for (Eigen::Index k = 0; k < c_hat.cols(); ++k) {
        const auto over = c_hat.col(k).head(ll);
        const auto under = c_hat.col(k).tail(ll);
        const double scale = c_hat.col(k).cwiseAbs().maxCoeff();
        std::vector<bool> usable(l);
        ComplexVector v(ll);
        for (Eigen::Index i = 0; i < ll; ++i) {
            usable[static_cast<std::size_t>(i)] = std::abs(over(i)) > floor * scale && scale > 0.0;
            v(i) = usable[static_cast<std::size_t>(i)] ? under(i) / std::conj(over(i)) : cplx{0.0, 0.0};
        }
        cplx lag{0.0, 0.0};
        for (Eigen::Index i = 0; i + 1 < ll; ++i) {
            lag += std::conj(v(i)) * v(i + 1);
        }
        const auto kk = static_cast<std::size_t>(k);
        out.flagged[kk] = std::find(usable.begin(), usable.end(), false) != usable.end();
        out.omega[kk] = std::arg(lag);
    }
    return out;
}

std::vector<cplx> pathloss_rice(const FactorEstimate& factors, const MultipathParams& omegas,
                                const TrainingSequence& ts, GainAveraging mode) {
    const auto k_paths = static_cast<std::size_t>(factors.b_r.cols());
    if (omegas.omega_r.size() != k_paths || omegas.omega_x.size() != k_paths || omegas.omega_y.size() != k_paths) {
        throw std::invalid_argument("pathloss_rice: phase lists do not match the factor column count");
    }
    const auto ll = static_cast<Eigen::Index>(ts.l);
    const auto m_r = static_cast<std::size_t>(factors.b_r.rows());
    std::vector<cplx> beta(k_paths);
    for (std::size_t k = 0; k < k_paths; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const ComplexVector a_r = channel::steering_ula(omegas.omega_r[k], m_r);
        const cplx xi_r = a_r.dot(factors.b_r.col(kk)) / static_cast<double>(m_r);

        // Rows L-1, L-2 hold s_bar_1^H a, s_bar_2^H a; rows 2L-1, 2L-2 the flipped pair.
        auto forward = [&](const ComplexMatrix& c, double omega, std::size_t m) {
            const cplx e = c(ll - 1, kk);
            const cplx f = c(ll - 2, kk);
            return std::conj((e - f) / std::polar(1.0, static_cast<double>(m - 1) * omega));
        };
        auto backward = [&](const ComplexMatrix& c, double omega) {
            const cplx e = c(2 * ll - 1, kk);
            const cplx f = c(2 * ll - 2, kk);
            return std::conj(e - f * std::polar(1.0, omega));
        };
        const cplx fwd = forward(factors.c_y, omegas.omega_y[k], ts.m_y()) *
                         forward(factors.c_x, omegas.omega_x[k], ts.m_x());
        const cplx bwd = backward(factors.c_y, omegas.omega_y[k]) * backward(factors.c_x, omegas.omega_x[k]);
        cplx xi_xy;
        switch (mode) {
            case GainAveraging::forward: xi_xy = fwd; break;
            case GainAveraging::backward: xi_xy = bwd; break;
            case GainAveraging::both: xi_xy = 0.5 * (fwd + bwd); break;
        }
        beta[k] = xi_r * xi_xy;
    }
    return beta;
}

RiceResult rice_estimate_full(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                              const ArrayGeometry& geom) {
    geom.validate();
    if (static_cast<std::size_t>(y.rows()) != geom.m_r ||
        static_cast<std::size_t>(y.cols()) != ts.n_x() * ts.n_y()) {
        throw std::invalid_argument("rice_estimate: received block must be M_r x N_x N_y");
    }
    if (ts.m_x() != geom.m_x || ts.m_y() != geom.m_y) {
        throw std::invalid_argument("rice_estimate: training does not match the transmit array");
    }
    RiceResult r;
    r.plan = plan_smoothing(geom.m_r, ts.n_x(), ts.n_y());
    if (k > r.plan.k_max) {
        throw IdentifiabilityError("rice_estimate: K = " + std::to_string(k) + " exceeds the identifiable " +
                                   std::to_string(r.plan.k_max));
    }
    r.factors = factor_estimate(y, k, r.plan, ts.n_x(), ts.n_y());
    r.params.omega_r = doa_phases(r.factors.b_r);
    const CriPhases px = dod_phases_cri(r.factors.c_x, ts.l);
    const CriPhases py = dod_phases_cri(r.factors.c_y, ts.l);
    r.params.omega_x = px.omega;
    r.params.omega_y = py.omega;
    r.flagged.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        r.flagged[i] = px.flagged[i] || py.flagged[i];
    }
    r.params.beta = pathloss_rice(r.factors, r.params, ts);
    return r;
}

MultipathParams rice_estimate(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                              const ArrayGeometry& geom) {
    return rice_estimate_full(y, k, ts, geom).params;
}

ComplexMatrix reconstruct_channel(const MultipathParams& params, const ArrayGeometry& geom) {
    return channel::synth_channel(params, geom);
}

MultipathParams sorted_by_omega_r(const MultipathParams& params) {
    std::vector<std::size_t> order(params.k());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return wrap_phase(params.omega_r[a]) < wrap_phase(params.omega_r[b]);
    });
    MultipathParams out;
    for (std::size_t i : order) {
        out.omega_r.push_back(params.omega_r[i]);
        out.omega_x.push_back(params.omega_x[i]);
        out.omega_y.push_back(params.omega_y[i]);
        out.beta.push_back(params.beta[i]);
    }
    return out;
}

}  // namespace fddest::rice
