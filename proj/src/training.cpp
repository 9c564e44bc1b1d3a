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

#include "fddest/training.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace fddest::training {

namespace {

constexpr double pi = std::numbers::pi;

ComplexVector unit_symbols(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> phase(-pi, pi);
    ComplexVector s(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s(i) = std::polar(1.0, phase(rng));
    }
    return s;
}

// First m - 1 entries taken from the tail of pool (ending one before its last
// element), closed by the designated last symbol.
ComplexVector shifted_window(const ComplexVector& pool, std::size_t m, cplx last) {
    const auto n = static_cast<Eigen::Index>(pool.size());
    const auto mm = static_cast<Eigen::Index>(m);
    ComplexVector w(mm);
    w.head(mm - 1) = pool.segment(n - mm, mm - 1);
    w(mm - 1) = last;
    return w;
}

}  // namespace

ComplexMatrix conjugate_flipped(const ComplexVector& window, std::size_t l) {
    const auto m = static_cast<Eigen::Index>(window.size());
    const auto ll = static_cast<Eigen::Index>(l);
    ComplexMatrix s = ComplexMatrix::Zero(m, 2 * ll);
    for (Eigen::Index j = 0; j < ll; ++j) {
        const Eigen::Index idx = ll - j;  // s_bar_idx
        const Eigen::Index nonzero = m + 1 - idx;
        s.col(j).head(nonzero) = window.head(nonzero);
        s.col(ll + j).head(nonzero) = window.head(nonzero).reverse().conjugate();
    }
    return s;
}

TrainingSequence build_training(const ArrayGeometry& geom, std::size_t l, Rng& rng, SymbolSharing sharing) {
    geom.validate();
    if (l < 2) {
        throw std::invalid_argument("build_training: L must be at least 2");
    }
    if (geom.m_x < l + 1 || geom.m_y < l + 1) {
        throw std::invalid_argument("build_training: transmit array dimensions must exceed L");
    }
    TrainingSequence ts;
    ts.l = l;
    const bool x_leads = geom.m_x >= geom.m_y;
    const std::size_t m_lead = x_leads ? geom.m_x : geom.m_y;
    const std::size_t m_other = x_leads ? geom.m_y : geom.m_x;

    ComplexVector lead;
    ComplexVector other;
    if (sharing == SymbolSharing::shared) {
        ts.base_symbols = unit_symbols(m_lead, rng);
        lead = ts.base_symbols;
        other = shifted_window(ts.base_symbols, m_other, 1.0 / lead(lead.size() - 1));
    } else {
        lead = unit_symbols(m_lead, rng);
        ComplexVector pool = unit_symbols(m_other, rng);
        other = shifted_window(pool, m_other, 1.0 / lead(lead.size() - 1));
        ts.base_symbols.resize(lead.size() + pool.size());
        ts.base_symbols << lead, pool;
    }
    ts.window_x = x_leads ? lead : other;
    ts.window_y = x_leads ? other : lead;
    ts.s_x = conjugate_flipped(ts.window_x, l);
    ts.s_y = conjugate_flipped(ts.window_y, l);
    return ts;
}

ComplexMatrix full_matrix(const TrainingSequence& ts) { return mdalg::kron(ts.s_y, ts.s_x); }

cplx normalization_product(const TrainingSequence& ts) {
    const auto lx = static_cast<Eigen::Index>(ts.l - 1);
    return ts.s_x(ts.s_x.rows() - 1, lx) * ts.s_y(ts.s_y.rows() - 1, lx);
}

void validate(const TrainingSequence& ts, double tol) {
    if (ts.l < 2) {
        throw std::invalid_argument("TrainingSequence: L must be at least 2");
    }
    for (Axis a : {Axis::x, Axis::y}) {
        const ComplexMatrix& s = ts.axis(a);
        const ComplexVector& w = a == Axis::x ? ts.window_x : ts.window_y;
        if (static_cast<std::size_t>(s.cols()) != 2 * ts.l) {
            throw std::invalid_argument("TrainingSequence: each axis needs 2L columns");
        }
        if (w.size() != s.rows()) {
            throw std::invalid_argument("TrainingSequence: symbol window length differs from array size");
        }
        if ((s - conjugate_flipped(w, ts.l)).cwiseAbs().maxCoeff() > tol) {
            throw std::invalid_argument("TrainingSequence: columns break the conjugate-flipped pattern");
        }
    }
    if (std::abs(normalization_product(ts) - cplx{1.0, 0.0}) > tol) {
        throw std::invalid_argument("TrainingSequence: normalization product differs from one");
    }
}

double cri_check(const TrainingSequence& ts, double omega, Axis axis) {
    const ComplexMatrix& s = ts.axis(axis);
    const auto m = static_cast<std::size_t>(s.rows());
    const auto ll = static_cast<Eigen::Index>(ts.l);
    const ComplexVector a = channel::steering_ula(omega, m);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < ll; ++j) {
        const Eigen::Index idx = ll - j;
        const cplx over = s.col(j).dot(a);  // s_bar^H a
        const cplx under = s.col(ll + j).dot(a);
        const cplx rotated = std::conj(over) * a(static_cast<Eigen::Index>(m) - idx);
        worst = std::max(worst, std::abs(under - rotated));
    }
    return worst;
}

double min_overline_response(const TrainingSequence& ts, const MultipathParams& params) {
    double smallest = std::numeric_limits<double>::infinity();
    const auto ll = static_cast<Eigen::Index>(ts.l);
    for (std::size_t k = 0; k < params.k(); ++k) {
        const ComplexVector cx = ts.s_x.leftCols(ll).adjoint() * channel::steering_ula(params.omega_x[k], ts.m_x());
        const ComplexVector cy = ts.s_y.leftCols(ll).adjoint() * channel::steering_ula(params.omega_y[k], ts.m_y());
        smallest = std::min({smallest, cx.cwiseAbs().minCoeff(), cy.cwiseAbs().minCoeff()});
    }
    return smallest;
}

namespace {

using nlohmann::json;

json encode(const ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

json encode(const ComplexMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out.push_back(encode(ComplexVector(m.row(i).transpose())));
    }
    return out;
}

cplx decode_scalar(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("training json: complex entries must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexVector decode_vector(const json& j) {
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = decode_scalar(j[i]);
    }
    return v;
}

ComplexMatrix decode_matrix(const json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("training json: matrix must be a non-empty array of rows");
    }
    const std::size_t cols = j[0].size();
    ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != cols) {
            throw std::invalid_argument("training json: ragged matrix");
        }
        m.row(static_cast<Eigen::Index>(r)) = decode_vector(j[r]).transpose();
    }
    return m;
}

}  // namespace

std::string to_json(const TrainingSequence& ts) {
    json doc;
    doc["l"] = ts.l;
    doc["base_symbols"] = encode(ts.base_symbols);
    doc["window_x"] = encode(ts.window_x);
    doc["window_y"] = encode(ts.window_y);
    doc["s_x"] = encode(ts.s_x);
    doc["s_y"] = encode(ts.s_y);
    return doc.dump(2);
}

TrainingSequence from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("training json: ") + e.what());
    }
    TrainingSequence ts;
    try {
        ts.l = doc.at("l").get<std::size_t>();
        ts.base_symbols = decode_vector(doc.at("base_symbols"));
        ts.window_x = decode_vector(doc.at("window_x"));
        ts.window_y = decode_vector(doc.at("window_y"));
        ts.s_x = decode_matrix(doc.at("s_x"));
        ts.s_y = decode_matrix(doc.at("s_y"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("training json: ") + e.what());
    }
    validate(ts);
    return ts;
}

}  // namespace fddest::training
