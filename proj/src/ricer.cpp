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

#include "fddest/ricer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace fddest::ricer {

ComplexMatrix projector(const ComplexVector& c, const ComplexMatrix& s) {
    const double norm2 = c.squaredNorm();
    if (!(norm2 > 0.0)) {
        throw std::invalid_argument("projector: zero signal vector");
    }
    if (c.size() != s.cols()) {
        throw std::invalid_argument("projector: vector length must equal the training column count");
    }
    ComplexMatrix complement = ComplexMatrix::Identity(c.size(), c.size()) - (c * c.adjoint()) / norm2;
    ComplexMatrix p = s * complement * s.adjoint();
    return 0.5 * (p + p.adjoint());
}

ComplexMatrix subspace_projector(const ComplexMatrix& u, const ComplexMatrix& s) {
    if (u.rows() != s.cols()) {
        throw std::invalid_argument("subspace_projector: basis rows must equal the training column count");
    }
    ComplexMatrix complement = ComplexMatrix::Identity(u.rows(), u.rows()) - u * u.adjoint();
    ComplexMatrix p = s * complement * s.adjoint();
    return 0.5 * (p + p.adjoint());
}

ComplexVector poly_coeffs(const ComplexMatrix& p) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw std::invalid_argument("poly_coeffs: projector must be square");
    }
    const Eigen::Index m = p.rows();
    ComplexVector c = ComplexVector::Zero(2 * m - 1);
    for (Eigen::Index row = 0; row < m; ++row) {
        for (Eigen::Index col = 0; col < m; ++col) {
            c(col - row + m - 1) += p(row, col);
        }
    }
    return c;
}

cplx eval_laurent(const ComplexVector& coeffs, cplx z) {
    const Eigen::Index deg = coeffs.size() - 1;
    cplx acc{0.0, 0.0};
    for (Eigen::Index i = deg; i >= 0; --i) {
        acc = acc * z + coeffs(i);
    }
    return acc * std::pow(z, -static_cast<double>(deg / 2));
}

RootSet roots_inside(const ComplexVector& coeffs) {
    const double biggest = coeffs.size() > 0 ? coeffs.cwiseAbs().maxCoeff() : 0.0;
    if (!(biggest > 0.0)) {
        throw std::invalid_argument("roots_inside: polynomial is identically zero");
    }
    Eigen::Index hi = coeffs.size() - 1;
    while (hi > 0 && std::abs(coeffs(hi)) <= 1e-14 * biggest) {
        --hi;
    }
    Eigen::Index lo = 0;
    while (lo < hi && std::abs(coeffs(lo)) <= 1e-14 * biggest) {
        ++lo;
    }
    RootSet rs;
    rs.roots.assign(static_cast<std::size_t>(lo), cplx{0.0, 0.0});
    const Eigen::Index deg = hi - lo;
    if (deg > 0) {
        ComplexMatrix companion = ComplexMatrix::Zero(deg, deg);
        companion.diagonal(-1).setOnes();
        for (Eigen::Index i = 0; i < deg; ++i) {
            companion(i, deg - 1) = -coeffs(lo + i) / coeffs(hi);
        }
        const ComplexVector ev = mdalg::right_eigenvectors(companion).values;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            rs.roots.push_back(ev(i));
        }
    }
    std::vector<cplx> by_modulus = rs.roots;
    std::stable_sort(by_modulus.begin(), by_modulus.end(),
                     [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    rs.inner.assign(by_modulus.begin(), by_modulus.begin() + static_cast<std::ptrdiff_t>(by_modulus.size() / 2));
    return rs;
}

double select_root(const RootSet& rs, double omega_guess) {
    if (rs.inner.empty()) {
        throw std::invalid_argument("select_root: no inner roots");
    }
    constexpr double tie = 1e-12;
    const cplx* best = nullptr;
    double best_dist = 0.0;
    for (const cplx& z : rs.inner) {
        const double d = phase_distance(std::arg(z), omega_guess);
        if (best == nullptr || d < best_dist - tie ||
            (std::abs(d - best_dist) <= tie && std::abs(z) > std::abs(*best))) {
            best = &z;
            best_dist = d;
        }
    }
    return std::arg(*best);
}

std::vector<double> closest_to_circle(const RootSet& rs, std::size_t k) {
    std::vector<cplx> cand = rs.roots;
    std::stable_sort(cand.begin(), cand.end(), [](cplx a, cplx b) {
        return std::abs(std::abs(a) - 1.0) < std::abs(std::abs(b) - 1.0);
    });
    constexpr double same_phase = 1e-6;
    std::vector<double> out;
    for (const cplx& z : cand) {
        if (out.size() == k) {
            break;
        }
        const double w = std::arg(z);
        const bool dup = std::any_of(out.begin(), out.end(), [&](double o) { return phase_distance(o, w) < same_phase; });
        if (!dup) {
            out.push_back(w);
        }
    }
    if (out.size() < k) {
        throw NumericalError("closest_to_circle: fewer than K distinct root phases");
    }
    std::sort(out.begin(), out.end());
    return out;
}

double grid_search_phase(const ComplexMatrix& p, std::size_t points) {
    const auto m = static_cast<std::size_t>(p.rows());
    double best_w = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double w = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
        const ComplexVector a = channel::steering_ula(w, m);
        const double cost = a.dot(p * a).real();
        if (cost < best_cost) {
            best_cost = cost;
            best_w = w;
        }
    }
    return best_w;
}

std::vector<cplx> pathloss_ls(const ComplexMatrix& y, const ComplexMatrix& s_full, const MultipathParams& omegas,
                              const ArrayGeometry& geom) {
    const std::size_t k = omegas.omega_r.size();
    const ComplexMatrix a_r = channel::steering_matrix(omegas.omega_r, geom.m_r);
    const ComplexMatrix a_t = mdalg::khatri_rao(channel::steering_matrix(omegas.omega_y, geom.m_y),
                                                channel::steering_matrix(omegas.omega_x, geom.m_x));
    const ComplexMatrix design = mdalg::khatri_rao(s_full.transpose() * a_t.conjugate(), a_r);
    if (mdalg::numerical_rank(design) < k) {
        throw NumericalError("pathloss_ls: design matrix is rank deficient");
    }
    const ComplexVector vec_y = y.reshaped();
    const ComplexVector beta = design.colPivHouseholderQr().solve(vec_y);
    return {beta.data(), beta.data() + beta.size()};
}

namespace {

// Newton steps on d/dw a(w)^H P a(w) = 0. A root on the circle is a double
// root, which eigenvalue solvers only resolve to about sqrt(eps).
double polish_phase(const ComplexVector& coeffs, double omega) {
    const auto centre = static_cast<double>((coeffs.size() - 1) / 2);
    auto derivs = [&](double w) {
        double f = 0.0, d1 = 0.0, d2 = 0.0;
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            const double n = static_cast<double>(i) - centre;
            const cplx t = coeffs(i) * std::polar(1.0, n * w);
            f += t.real();
            d1 -= n * t.imag();
            d2 -= n * n * t.real();
        }
        return std::array<double, 3>{f, d1, d2};
    };
    for (int it = 0; it < 8; ++it) {
        const auto [f, d1, d2] = derivs(omega);
        (void)f;
        if (d2 <= 0.0) {
            break;
        }
        const double step = d1 / d2;
        if (std::abs(step) > 1e-3) {
            break;
        }
        omega -= step;
        if (std::abs(step) < 1e-15) {
            break;
        }
    }
    return wrap_phase(omega);
}

double refine_axis(const ComplexVector& c, const ComplexMatrix& s, double guess) {
    const ComplexVector coeffs = poly_coeffs(projector(c, s));
    return polish_phase(coeffs, select_root(roots_inside(coeffs), guess));
}

}  // namespace

MultipathParams refine(const RiceResult& rice_result, const ComplexMatrix& y, const TrainingSequence& ts,
                       const ArrayGeometry& geom) {
    const MultipathParams& coarse = rice_result.params;
    MultipathParams out;
    out.omega_r = coarse.omega_r;
    for (std::size_t k = 0; k < coarse.k(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out.omega_x.push_back(refine_axis(rice_result.factors.c_x.col(kk), ts.s_x, coarse.omega_x[k]));
        out.omega_y.push_back(refine_axis(rice_result.factors.c_y.col(kk), ts.s_y, coarse.omega_y[k]));
    }
    out.beta = pathloss_ls(y, training::full_matrix(ts), out, geom);
    return out;
}

MultipathParams ricer_estimate(const ComplexMatrix& y, std::size_t k, const TrainingSequence& ts,
                               const ArrayGeometry& geom) {
    return refine(rice::rice_estimate_full(y, k, ts, geom), y, ts, geom);
}

MultipathParams single_antenna_estimate(const ComplexVector& y, std::size_t k, const TrainingSequence& ts) {
    const std::size_t n_x = ts.n_x();
    const std::size_t n_y = ts.n_y();
    if (k == 0) {
        throw std::invalid_argument("single_antenna_estimate: k must be positive");
    }
    if (k >= std::min(n_x, n_y)) {
        throw IdentifiabilityError("single_antenna_estimate: needs K < min(N_x, N_y), got K = " + std::to_string(k));
    }
    if (static_cast<std::size_t>(y.size()) != n_x * n_y) {
        throw std::invalid_argument("single_antenna_estimate: expected N_x N_y samples");
    }
    // conj(y) = (C_y kr C_x) conj(beta); reshape to C_x diag(conj(beta)) C_y^T.
    const ComplexVector y_conj = y.conjugate();
    const ComplexMatrix y_mat = y_conj.reshaped(static_cast<Eigen::Index>(n_x), static_cast<Eigen::Index>(n_y));
    const mdalg::TruncatedSvd svd = mdalg::truncated_svd(y_mat, k);
    if (!(svd.sigma(0) > 0.0) || svd.sigma(static_cast<Eigen::Index>(k) - 1) < 1e-12 * svd.sigma(0)) {
        throw IdentifiabilityError("single_antenna_estimate: data has fewer than K significant components");
    }

    MultipathParams out;
    const ComplexVector coeffs_x = poly_coeffs(subspace_projector(svd.u, ts.s_x));
    out.omega_x = closest_to_circle(roots_inside(coeffs_x), k);
    for (double& w : out.omega_x) {
        w = polish_phase(coeffs_x, w);
    }
    const ComplexMatrix c_x = ts.s_x.adjoint() * channel::steering_matrix(out.omega_x, ts.m_x());
    const ComplexMatrix c_y = (mdalg::pinv(c_x) * y_mat).transpose();
    const CriPhases guess = rice::dod_phases_cri(c_y, ts.l);
    for (std::size_t i = 0; i < k; ++i) {
        out.omega_y.push_back(refine_axis(c_y.col(static_cast<Eigen::Index>(i)), ts.s_y, guess.omega[i]));
    }
    out.omega_r.assign(k, 0.0);
    const ComplexMatrix design =
        mdalg::khatri_rao(ts.s_y.adjoint() * channel::steering_matrix(out.omega_y, ts.m_y()), c_x);
    if (mdalg::numerical_rank(design) < k) {
        throw NumericalError("single_antenna_estimate: design matrix is rank deficient");
    }
    const ComplexVector beta_conj = design.colPivHouseholderQr().solve(y_conj);
    for (Eigen::Index i = 0; i < beta_conj.size(); ++i) {
        out.beta.push_back(std::conj(beta_conj(i)));
    }
    return out;
}

}  // namespace fddest::ricer
