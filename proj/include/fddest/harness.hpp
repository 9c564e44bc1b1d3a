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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fddest/baselines.hpp"
#include "fddest/metrics.hpp"
#include "fddest/training.hpp"

namespace fddest {

enum class Estimator { rice, ricer, omp, benchmark, ls, genie };
enum class SweepAxis { snr, k, m_r };
enum class ScenarioMode { paper_fixed, grid, random };

std::string to_string(Estimator e);
std::string to_string(SweepAxis a);
Estimator estimator_from_string(const std::string& name);
SweepAxis axis_from_string(const std::string& name);
ScenarioMode mode_from_string(const std::string& name);

struct ExperimentConfig {
    ArrayGeometry geometry{4, 10, 10, 0.5};
    std::size_t l = 2;
    std::size_t k = 4;
    double snr_db = 10.0;
    channel::SnrReference snr_reference = channel::SnrReference::per_antenna;
    std::vector<Estimator> estimators{Estimator::rice, Estimator::ricer, Estimator::omp, Estimator::benchmark};
    SweepAxis axis = SweepAxis::snr;
    std::vector<double> values{0, 5, 10, 15, 20};
    std::vector<std::size_t> paired_k;  // optional K per sweep point
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    ScenarioMode mode = ScenarioMode::grid;
    std::string preset_scenario;  // phase table name for paper_fixed mode
    channel::ScenarioOptions scenario{channel::PhaseMode::grid};
    AngleGrid omp_grid{};
    SymbolSharing sharing = SymbolSharing::shared;
    std::size_t ber_symbols = 10000;
    std::vector<std::size_t> ber_k_values;  // BER runs; empty means {k}
    bool record_timing = false;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string output_path;

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

struct EstimatorOutcome {
    bool failed = false;
    double nmse = 0.0;
    double param_err = 0.0;  // mean wrapped phase error over matched paths, NaN if not parametric
    double seconds = 0.0;
    double ber = 0.0;
    std::string error;
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::vector<EstimatorOutcome> outcomes;  // aligned with ExperimentConfig::estimators
};

struct SweepRow {
    double sweep_value = 0.0;
    std::string estimator;
    double nmse_mean = 0.0;
    double nmse_median = 0.0;
    double param_err_median = 0.0;
    std::size_t failures = 0;
    std::size_t trials = 0;
    double seconds = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::string to_csv() const;
    /// True if some estimator failed every trial of some sweep point.
    bool any_point_all_failed() const;
    const SweepRow* find(double sweep_value, const std::string& estimator) const;
};

struct BerRow {
    std::size_t k = 0;
    double snr_db = 0.0;
    std::string estimator;
    double ber_mean = 0.0;
    double ber_median = 0.0;
    std::size_t failures = 0;
    std::size_t trials = 0;
    double seconds = 0.0;
};

struct BerTable {
    std::vector<BerRow> rows;
    std::string to_csv() const;
    bool any_point_all_failed() const;
    const BerRow* find(std::size_t k, double snr_db, const std::string& estimator) const;
};

struct ScatterRow {
    std::size_t trial = 0;
    std::string estimator;
    std::size_t path = 0;
    std::array<double, 3> truth{};
    std::array<double, 3> estimate{};
};

struct ScatterTable {
    std::vector<ScatterRow> rows;
    std::size_t k = 0;
    std::map<std::string, std::size_t> failures;  // failed trials per estimator, counted as misses
    std::string to_csv() const;
    /// Fraction of individual matched phase estimates within tol of the truth.
    double fraction_within(const std::string& estimator, double tol) const;
};

namespace harness {

/// Per-trial RNG seed derived from (master seed, trial index).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// Phase tables of the identifiability scenarios: "fig2a" (K = 4) and "fig2b" (K = 8).
MultipathParams paper_phases(const std::string& name);

/// Configuration with axis value applied at a single sweep point.
ExperimentConfig at_point(const ExperimentConfig& cfg, std::size_t point);

/// One Monte-Carlo trial at the given sweep point.
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t point, std::size_t trial);

SweepTable run_sweep(const ExperimentConfig& cfg);

/// Zero-forcing QPSK link over every (K, SNR) pair; estimators may include
/// rice, ricer, omp, ls and genie.
BerTable run_ber(const ExperimentConfig& cfg);

/// Per-path phase estimates for the first sweep point, truth-matched.
ScatterTable run_scatter(const ExperimentConfig& cfg);

/// Zero-forcing precoder H^H (H H^H)^-1 with each column scaled to power 1/M_r,
/// so total transmit power is one.
ComplexMatrix zf_precoder(const ComplexMatrix& h_hat);

/// Hard-decision QPSK bit error rate over `symbols` vectors, noise variance
/// per receive antenna set from the mean channel entry power and snr_db.
double qpsk_zf_ber(const ComplexMatrix& h, const ComplexMatrix& precoder, double snr_db, std::size_t symbols,
                   Rng& rng);

}  // namespace harness

namespace config {

enum class RunKind { sweep, ber, scatter };

struct Preset {
    RunKind kind;
    ExperimentConfig cfg;
    std::string note;  // deviation from the published setup, if any
};

/// Known names: fig2a, fig2b, fig3, fig5, fig6, fig7.
Preset preset(const std::string& name);

/// Parses and validates a JSON document; unspecified fields keep the values in base.
ExperimentConfig from_json(const std::string& text, ExperimentConfig base = {});

std::string to_json(const ExperimentConfig& cfg);

}  // namespace config
}  // namespace fddest
