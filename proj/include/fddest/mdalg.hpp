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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

/// Dense complex linear and multilinear algebra used by the estimators.
///
/// Index conventions (all zero-based) for an M_r x (N_x N_y) received block
/// Y whose column n_y * N_x + n_x holds training sample (n_x, n_y):
///
///   mode-3 unfolding  Y3[n_x * M_r + m, n_y]        = Y[m, n_y * N_x + n_x]
///   mode-1 unfolding  Y1[n_y * N_x + n_x, m]        = Y[m, n_y * N_x + n_x]
///   smoothed matrix   Z[n_x * P + p, i * N_y + n_y] = Y3[n_x * M_r + p + i, n_y]
namespace fddest {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace mdalg {

/// Dense third-order tensor, first index fastest.
class Tensor3 {
  public:
    Tensor3(std::size_t dim_i, std::size_t dim_j, std::size_t dim_k);

    /// Sum of rank-one terms a_f o b_f o c_f over the common column index f.
    static Tensor3 from_factors(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c);

    cplx& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[i + dim_i_ * (j + dim_j_ * k)]; }
    const cplx& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[i + dim_i_ * (j + dim_j_ * k)];
    }

    std::size_t dim_i() const { return dim_i_; }
    std::size_t dim_j() const { return dim_j_; }
    std::size_t dim_k() const { return dim_k_; }

  private:
    std::size_t dim_i_, dim_j_, dim_k_;
    std::vector<cplx> data_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-wise Kronecker product; column f is a[:, f] (x) b[:, f].
ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b);

/// (N_x M_r) x N_y unfolding. For Y = B_r (C_y kr C_x)^H this equals
/// (conj(C_x) kr B_r) C_y^H.
ComplexMatrix mode3_unfold(const ComplexMatrix& y, std::size_t n_x, std::size_t n_y);

/// (N_x N_y) x M_r unfolding. For Y = B_r (C_y kr C_x)^H this equals
/// (conj(C_y) kr conj(C_x)) B_r^T.
ComplexMatrix mode1_unfold(const ComplexMatrix& y, std::size_t n_x, std::size_t n_y);

/// Spatial smoothing of the mode-3 unfolding over Q_r shifted windows of
/// length P_r along the receive array (P_r + Q_r = M_r + 1). Output is
/// (P_r N_x) x (Q_r N_y).
ComplexMatrix spatial_smooth(const ComplexMatrix& y3, std::size_t p_r, std::size_t q_r, std::size_t n_x,
                             std::size_t m_r);

/// Row permutation of a smoothed matrix from (n_x, p) to (p, n_x) ordering,
/// turning (conj(C_x) kr B_1) into (B_1 kr conj(C_x)).
ComplexMatrix swap_row_blocks(const ComplexMatrix& z, std::size_t p_r, std::size_t n_x);

struct TruncatedSvd {
    ComplexMatrix u;
    RealVector sigma;  // non-increasing
    ComplexMatrix v;
};

/// k dominant singular triplets. Throws std::invalid_argument if k is zero or
/// exceeds min(rows, cols).
TruncatedSvd truncated_svd(const ComplexMatrix& m, std::size_t k);

/// Full singular value list, non-increasing.
RealVector singular_values(const ComplexMatrix& m);

struct EigenPairs {
    ComplexMatrix vectors;
    ComplexVector values;
};

/// Right eigenvectors: m * vectors = vectors * diag(values).
EigenPairs right_eigenvectors(const ComplexMatrix& m);

/// Left eigenvectors stored as columns: vectors^H * m = diag(values) * vectors^H.
EigenPairs left_eigenvectors(const ComplexMatrix& m);

/// Moore-Penrose pseudo-inverse, singular values below rcond * sigma_1 dropped.
ComplexMatrix pinv(const ComplexMatrix& m, double rcond = 1e-10);

/// Numerical rank with the same cutoff rule as pinv.
std::size_t numerical_rank(const ComplexMatrix& m, double rcond = 1e-10);

}  // namespace mdalg
}  // namespace fddest
