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

#include "fddest/mdalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fddest::mdalg {

Tensor3::Tensor3(std::size_t dim_i, std::size_t dim_j, std::size_t dim_k)
    : dim_i_(dim_i), dim_j_(dim_j), dim_k_(dim_k), data_(dim_i * dim_j * dim_k, cplx{0.0, 0.0}) {}

Tensor3 Tensor3::from_factors(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    if (a.cols() != b.cols() || a.cols() != c.cols()) {
        throw std::invalid_argument("Tensor3::from_factors: factor column counts differ");
    }
    Tensor3 t(a.rows(), b.rows(), c.rows());
    for (Eigen::Index f = 0; f < a.cols(); ++f) {
        for (Eigen::Index k = 0; k < c.rows(); ++k) {
            for (Eigen::Index j = 0; j < b.rows(); ++j) {
                const cplx bc = b(j, f) * c(k, f);
                for (Eigen::Index i = 0; i < a.rows(); ++i) {
                    t(i, j, k) += a(i, f) * bc;
                }
            }
        }
    }
    return t;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("khatri_rao: column counts differ (" + std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.cols()) + ")");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols());
    for (Eigen::Index f = 0; f < a.cols(); ++f) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out.col(f).segment(i * b.rows(), b.rows()) = a(i, f) * b.col(f);
        }
    }
    return out;
}

namespace {

void check_block_columns(const ComplexMatrix& y, std::size_t n_x, std::size_t n_y, const char* who) {
    if (n_x == 0 || n_y == 0 || static_cast<std::size_t>(y.cols()) != n_x * n_y) {
        throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(n_x * n_y) +
                                    " columns, got " + std::to_string(y.cols()));
    }
}

}  // namespace

ComplexMatrix mode3_unfold(const ComplexMatrix& y, std::size_t n_x, std::size_t n_y) {
    check_block_columns(y, n_x, n_y, "mode3_unfold");
    const auto m_r = static_cast<std::size_t>(y.rows());
    ComplexMatrix y3(n_x * m_r, n_y);
    for (std::size_t ny = 0; ny < n_y; ++ny) {
        for (std::size_t nx = 0; nx < n_x; ++nx) {
            y3.col(ny).segment(nx * m_r, m_r) = y.col(ny * n_x + nx);
        }
    }
    return y3;
}

ComplexMatrix mode1_unfold(const ComplexMatrix& y, std::size_t n_x, std::size_t n_y) {
    check_block_columns(y, n_x, n_y, "mode1_unfold");
    return y.transpose();
}

ComplexMatrix spatial_smooth(const ComplexMatrix& y3, std::size_t p_r, std::size_t q_r, std::size_t n_x,
                             std::size_t m_r) {
    if (p_r + q_r != m_r + 1) {
        throw std::invalid_argument("spatial_smooth: P_r + Q_r must equal M_r + 1");
    }
    if (p_r < 2) {
        throw std::invalid_argument("spatial_smooth: P_r must be at least 2");
    }
    if (static_cast<std::size_t>(y3.rows()) != n_x * m_r) {
        throw std::invalid_argument("spatial_smooth: mode-3 unfolding must have N_x * M_r rows");
    }
    const auto n_y = static_cast<std::size_t>(y3.cols());
    ComplexMatrix z(p_r * n_x, q_r * n_y);
    for (std::size_t shift = 0; shift < q_r; ++shift) {
        for (std::size_t nx = 0; nx < n_x; ++nx) {
            z.block(nx * p_r, shift * n_y, p_r, n_y) = y3.block(nx * m_r + shift, 0, p_r, n_y);
        }
    }
    return z;
}

ComplexMatrix swap_row_blocks(const ComplexMatrix& z, std::size_t p_r, std::size_t n_x) {
    if (static_cast<std::size_t>(z.rows()) != p_r * n_x) {
        throw std::invalid_argument("swap_row_blocks: row count must be P_r * N_x");
    }
    ComplexMatrix out(z.rows(), z.cols());
    for (std::size_t nx = 0; nx < n_x; ++nx) {
        for (std::size_t p = 0; p < p_r; ++p) {
            out.row(p * n_x + nx) = z.row(nx * p_r + p);
        }
    }
    return out;
}

TruncatedSvd truncated_svd(const ComplexMatrix& m, std::size_t k) {
    const auto full = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
    if (k == 0 || k > full) {
        throw std::invalid_argument("truncated_svd: k = " + std::to_string(k) + " outside [1, " +
                                    std::to_string(full) + "]");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto kk = static_cast<Eigen::Index>(k);
    return {svd.matrixU().leftCols(kk), svd.singularValues().head(kk), svd.matrixV().leftCols(kk)};
}

RealVector singular_values(const ComplexMatrix& m) {
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

EigenPairs right_eigenvectors(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("right_eigenvectors: matrix must be square");
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, true);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("right_eigenvectors: eigendecomposition did not converge");
    }
    return {es.eigenvectors(), es.eigenvalues()};
}

EigenPairs left_eigenvectors(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("left_eigenvectors: matrix must be square");
    }
    // w^H m = lambda w^H  <=>  m^H w = conj(lambda) w
    EigenPairs adj = right_eigenvectors(m.adjoint());
    return {adj.vectors, adj.values.conjugate()};
}

ComplexMatrix pinv(const ComplexMatrix& m, double rcond) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    RealVector inv = RealVector::Zero(s.size());
    if (s.size() > 0 && s(0) > 0.0) {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) > rcond * s(0)) {
                inv(i) = 1.0 / s(i);
            }
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

std::size_t numerical_rank(const ComplexMatrix& m, double rcond) {
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) <= 0.0) {
        return 0;
    }
    return static_cast<std::size_t>((s.array() > rcond * s(0)).count());
}

}  // namespace fddest::mdalg
