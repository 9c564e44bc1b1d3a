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

#include "fddest/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fddest/rice.hpp"
#include "fddest/ricer.hpp"

namespace fddest {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kLinkStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kOrthStream = 0xc2b2ae3d27d4eb4fULL;
constexpr int kTrainingRedraws = 64;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TrialSetup {
    MultipathParams truth;
    TrainingSequence ts;
    ComplexMatrix h;
    ComplexMatrix s_full;
    ComplexMatrix y;
};

MultipathParams draw_params(const ExperimentConfig& c, Rng& rng) {
    if (c.mode == ScenarioMode::paper_fixed) {
        MultipathParams p = harness::paper_phases(c.preset_scenario);
        if (p.k() != c.k) throw std::invalid_argument("paper_fixed scenario has a different path count");
        for (auto& b : p.beta) b = channel::rician_gain(c.scenario.rician_k_db, c.scenario.mean_power, rng);
        return p;
    }
    channel::ScenarioOptions opts = c.scenario;
    opts.mode = c.mode == ScenarioMode::grid ? channel::PhaseMode::grid : channel::PhaseMode::random;
    return channel::random_scenario(c.k, c.geometry, rng, opts);
}

TrialSetup make_setup(const ExperimentConfig& c, Rng& rng) {
    TrialSetup s;
    s.truth = draw_params(c, rng);
    s.ts = training::build_training(c.geometry, c.l, rng, c.sharing);
    for (int i = 0; i < kTrainingRedraws && training::min_overline_response(s.ts, s.truth) < 1e-6; ++i) {
        s.ts = training::build_training(c.geometry, c.l, rng, c.sharing);
    }
    s.h = channel::synth_channel(s.truth, c.geometry);
    s.s_full = training::full_matrix(s.ts);
    s.y = channel::received(s.h, s.s_full, c.snr_db, rng, c.snr_reference);
    return s;
}

double mean_phase_err(const MultipathParams& est, const MultipathParams& truth) {
    if (est.k() != truth.k()) return kNaN;
    return metrics::match_paths(est, truth).mean_phase_error();
}

// Produces a channel estimate for one estimator; parametric ones also set `params`.
class EstimatorRunner {
public:
    EstimatorRunner(const ExperimentConfig& c, const TrialSetup& s, std::uint64_t seed) : c_(c), s_(s), seed_(seed) {}

    ComplexMatrix estimate(Estimator e, std::optional<MultipathParams>& params) {
        params.reset();
        switch (e) {
            case Estimator::rice:
                params = rice_result().params;
                return channel::synth_channel(*params, c_.geometry);
            case Estimator::ricer:
                params = ricer::refine(rice_result(), s_.y, s_.ts, c_.geometry);
                return channel::synth_channel(*params, c_.geometry);
            case Estimator::omp:
                params = baselines::omp_estimate(s_.y, s_.s_full, c_.geometry, c_.omp_grid, c_.k);
                return channel::synth_channel(*params, c_.geometry);
            case Estimator::ls: {
                Rng rng(seed_ ^ kOrthStream);
                const ComplexMatrix s_orth = baselines::orthogonal_training(c_.geometry.m_t());
                const ComplexMatrix y_orth = channel::received(s_.h, s_orth, c_.snr_db, rng, c_.snr_reference);
                return baselines::ls_orthogonal_estimate(y_orth, s_orth);
            }
            case Estimator::genie:
                params = s_.truth;
                return s_.h;
            case Estimator::benchmark:
                break;
        }
        throw std::invalid_argument("estimator has no channel estimate: " + to_string(e));
    }

private:
    const RiceResult& rice_result() {
        if (!rice_) rice_ = rice::rice_estimate_full(s_.y, c_.k, s_.ts, c_.geometry);
        return *rice_;
    }

    const ExperimentConfig& c_;
    const TrialSetup& s_;
    std::uint64_t seed_;
    std::optional<RiceResult> rice_;
};

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

namespace harness {

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    return splitmix(splitmix(master) ^ static_cast<std::uint64_t>(trial));
}

MultipathParams paper_phases(const std::string& name) {
    auto scaled = [](std::vector<double> v) {
        for (double& x : v) x = wrap_phase(x * kPi);
        return v;
    };
    MultipathParams p;
    if (name == "fig2a") {
        p.omega_r = scaled({0.8, 0.57, 0.1, 0.33});
        p.omega_x = scaled({0.36, 0.7, 0.53, 0.2});
        p.omega_y = scaled({0.8, 0.33, 0.57, 0.1});
    } else if (name == "fig2b") {
        p.omega_r = scaled({0.8, 0.4, 0.3, 0.1, 0.5, 0.2, 0.7, 0.6});
        p.omega_x = scaled({0.34, 0.49, 0.41, 0.27, 0.56, 0.7, 0.2, 0.63});
        p.omega_y = scaled({0.2, 0.3, 0.5, 0.8, 0.1, 0.6, 0.7, 0.4});
    } else {
        throw std::invalid_argument("unknown phase table: " + name);
    }
    p.beta.assign(p.omega_r.size(), cplx{1.0, 0.0});
    return p;
}

ExperimentConfig at_point(const ExperimentConfig& cfg, std::size_t point) {
    if (point >= cfg.values.size()) throw std::out_of_range("sweep point out of range");
    ExperimentConfig c = cfg;
    const double v = cfg.values[point];
    switch (cfg.axis) {
        case SweepAxis::snr:
            c.snr_db = v;
            break;
        case SweepAxis::k:
            c.k = static_cast<std::size_t>(std::llround(v));
            break;
        case SweepAxis::m_r:
            c.geometry.m_r = static_cast<std::size_t>(std::llround(v));
            break;
    }
    if (!cfg.paired_k.empty()) c.k = cfg.paired_k.at(point);
    return c;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t point, std::size_t trial) {
    const ExperimentConfig c = at_point(cfg, point);
    TrialResult result;
    result.seed = trial_seed(cfg.seed, trial);
    Rng rng(result.seed);
    const TrialSetup setup = make_setup(c, rng);
    EstimatorRunner runner(c, setup, result.seed);

    for (Estimator e : c.estimators) {
        EstimatorOutcome out;
        const auto t0 = Clock::now();
        try {
            if (e == Estimator::benchmark) {
                out.nmse = baselines::ls_benchmark_nmse(c.snr_db);
                out.param_err = kNaN;
            } else {
                std::optional<MultipathParams> params;
                const ComplexMatrix h_hat = runner.estimate(e, params);
                out.nmse = metrics::nmse(h_hat, setup.h);
                out.param_err = params ? mean_phase_err(*params, setup.truth) : kNaN;
                if (!std::isfinite(out.nmse)) throw NumericalError("non-finite estimate");
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& ex) {
            out = EstimatorOutcome{};
            out.failed = true;
            out.error = ex.what();
        }
        if (c.record_timing) out.seconds = elapsed(t0);
        result.outcomes.push_back(std::move(out));
    }
    return result;
}

SweepTable run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    SweepTable table;
    for (std::size_t p = 0; p < cfg.values.size(); ++p) {
        std::vector<TrialResult> results(cfg.trials);
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) { results[t] = run_trial(cfg, p, t); });

        for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
            SweepRow row;
            row.sweep_value = cfg.values[p];
            row.estimator = to_string(cfg.estimators[e]);
            row.trials = cfg.trials;
            std::vector<double> nmse, err;
            double seconds = 0.0;
            for (const auto& r : results) {
                const auto& o = r.outcomes[e];
                seconds += o.seconds;
                if (o.failed) {
                    ++row.failures;
                    continue;
                }
                nmse.push_back(o.nmse);
                if (!std::isnan(o.param_err)) err.push_back(o.param_err);
            }
            row.nmse_mean = nmse.empty() ? kNaN : metrics::mean(nmse);
            row.nmse_median = nmse.empty() ? kNaN : metrics::median(nmse);
            row.param_err_median = err.empty() ? kNaN : metrics::median(err);
            row.seconds = seconds / static_cast<double>(cfg.trials);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

ComplexMatrix zf_precoder(const ComplexMatrix& h_hat) {
    if (h_hat.rows() > h_hat.cols() || mdalg::numerical_rank(h_hat) < static_cast<std::size_t>(h_hat.rows())) {
        throw NumericalError("zf_precoder: channel estimate is rank deficient");
    }
    const ComplexMatrix gram = h_hat * h_hat.adjoint();
    ComplexMatrix w = h_hat.adjoint() * gram.partialPivLu().inverse();
    const double per_stream = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double norm = w.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("zf_precoder: degenerate precoder");
        w.col(j) *= per_stream / norm;
    }
    return w;
}

double qpsk_zf_ber(const ComplexMatrix& h, const ComplexMatrix& precoder, double snr_db, std::size_t symbols,
                   Rng& rng) {
    if (symbols == 0) throw std::invalid_argument("qpsk_zf_ber: zero symbols");
    const Eigen::Index streams = h.rows();
    const ComplexMatrix g = h * precoder;
    const double sigma2 = h.squaredNorm() / static_cast<double>(h.size()) * std::pow(10.0, -snr_db / 10.0);
    std::bernoulli_distribution bit(0.5);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
    const double amp = 1.0 / std::sqrt(2.0);

    std::size_t errors = 0;
    std::vector<std::array<bool, 2>> bits(static_cast<std::size_t>(streams));
    ComplexVector s(streams);
    for (std::size_t n = 0; n < symbols; ++n) {
        for (Eigen::Index i = 0; i < streams; ++i) {
            auto& b = bits[static_cast<std::size_t>(i)];
            b = {bit(rng), bit(rng)};
            s(i) = cplx{b[0] ? -amp : amp, b[1] ? -amp : amp};
        }
        ComplexVector r = g * s;
        for (Eigen::Index i = 0; i < streams; ++i) {
            r(i) += cplx{gauss(rng), gauss(rng)};
            const auto& b = bits[static_cast<std::size_t>(i)];
            errors += (r(i).real() < 0.0) != b[0];
            errors += (r(i).imag() < 0.0) != b[1];
        }
    }
    return static_cast<double>(errors) / static_cast<double>(2 * symbols * static_cast<std::size_t>(streams));
}

BerTable run_ber(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.axis != SweepAxis::snr) throw std::invalid_argument("ber runs sweep snr only");
    for (Estimator e : cfg.estimators) {
        if (e == Estimator::benchmark) throw std::invalid_argument("benchmark has no channel estimate for ber");
    }
    const std::vector<std::size_t> ks = cfg.ber_k_values.empty() ? std::vector<std::size_t>{cfg.k} : cfg.ber_k_values;

    BerTable table;
    for (std::size_t k : ks) {
        ExperimentConfig base = cfg;
        base.k = k;
        for (std::size_t p = 0; p < cfg.values.size(); ++p) {
            const ExperimentConfig c = at_point(base, p);
            std::vector<std::vector<EstimatorOutcome>> results(cfg.trials);
            parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
                const std::uint64_t seed = trial_seed(cfg.seed, t);
                Rng rng(seed);
                const TrialSetup setup = make_setup(c, rng);
                EstimatorRunner runner(c, setup, seed);
                auto& outs = results[t];
                for (Estimator e : c.estimators) {
                    EstimatorOutcome out;
                    const auto t0 = Clock::now();
                    try {
                        std::optional<MultipathParams> params;
                        const ComplexMatrix w = zf_precoder(runner.estimate(e, params));
                        Rng link(seed ^ kLinkStream);
                        out.ber = qpsk_zf_ber(setup.h, w, c.snr_db, c.ber_symbols, link);
                    } catch (const std::invalid_argument&) {
                        throw;
                    } catch (const std::exception& ex) {
                        out.failed = true;
                        out.error = ex.what();
                    }
                    if (c.record_timing) out.seconds = elapsed(t0);
                    outs.push_back(std::move(out));
                }
            });

            for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
                BerRow row;
                row.k = k;
                row.snr_db = c.snr_db;
                row.estimator = to_string(cfg.estimators[e]);
                row.trials = cfg.trials;
                std::vector<double> ber;
                double seconds = 0.0;
                for (const auto& outs : results) {
                    seconds += outs[e].seconds;
                    if (outs[e].failed) {
                        ++row.failures;
                    } else {
                        ber.push_back(outs[e].ber);
                    }
                }
                row.ber_mean = ber.empty() ? kNaN : metrics::mean(ber);
                row.ber_median = ber.empty() ? kNaN : metrics::median(ber);
                row.seconds = seconds / static_cast<double>(cfg.trials);
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

ScatterTable run_scatter(const ExperimentConfig& cfg) {
    cfg.validate();
    const ExperimentConfig c = at_point(cfg, 0);
    struct TrialRows {
        std::vector<ScatterRow> rows;
        std::vector<std::string> failed;
    };
    std::vector<TrialRows> results(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        const std::uint64_t seed = trial_seed(cfg.seed, t);
        Rng rng(seed);
        const TrialSetup setup = make_setup(c, rng);
        EstimatorRunner runner(c, setup, seed);
        for (Estimator e : c.estimators) {
            if (e == Estimator::benchmark || e == Estimator::ls) continue;
            const std::string name = to_string(e);
            try {
                std::optional<MultipathParams> params;
                runner.estimate(e, params);
                const PathMatch m = metrics::match_paths(*params, setup.truth);
                for (std::size_t i = 0; i < setup.truth.k(); ++i) {
                    const std::size_t j = m.est_of_truth[i];
                    results[t].rows.push_back(ScatterRow{
                        t, name, i,
                        {setup.truth.omega_r[i], setup.truth.omega_x[i], setup.truth.omega_y[i]},
                        {params->omega_r[j], params->omega_x[j], params->omega_y[j]}});
                }
            } catch (const std::invalid_argument&) {
                throw;
            } catch (const std::exception&) {
                results[t].failed.push_back(name);
            }
        }
    });

    ScatterTable table;
    table.k = c.k;
    for (Estimator e : c.estimators) table.failures[to_string(e)] = 0;
    for (auto& r : results) {
        for (auto& row : r.rows) table.rows.push_back(std::move(row));
        for (const auto& name : r.failed) ++table.failures[name];
    }
    return table;
}

}  // namespace harness

std::string SweepTable::to_csv() const {
    std::ostringstream os;
    os << "sweep_value,estimator,nmse_mean,nmse_median,param_err_median,failures,trials,seconds\n";
    for (const auto& r : rows) {
        os << fmt(r.sweep_value) << ',' << r.estimator << ',' << fmt(r.nmse_mean) << ',' << fmt(r.nmse_median) << ','
           << fmt(r.param_err_median) << ',' << r.failures << ',' << r.trials << ',' << fmt(r.seconds) << '\n';
    }
    return os.str();
}

bool SweepTable::any_point_all_failed() const {
    for (const auto& r : rows) {
        if (r.trials > 0 && r.failures == r.trials) return true;
    }
    return false;
}

const SweepRow* SweepTable::find(double sweep_value, const std::string& estimator) const {
    for (const auto& r : rows) {
        if (r.sweep_value == sweep_value && r.estimator == estimator) return &r;
    }
    return nullptr;
}

std::string BerTable::to_csv() const {
    std::ostringstream os;
    os << "k,sweep_value,estimator,ber_mean,ber_median,failures,trials,seconds\n";
    for (const auto& r : rows) {
        os << r.k << ',' << fmt(r.snr_db) << ',' << r.estimator << ',' << fmt(r.ber_mean) << ','
           << fmt(r.ber_median) << ',' << r.failures << ',' << r.trials << ',' << fmt(r.seconds) << '\n';
    }
    return os.str();
}

bool BerTable::any_point_all_failed() const {
    for (const auto& r : rows) {
        if (r.trials > 0 && r.failures == r.trials) return true;
    }
    return false;
}

const BerRow* BerTable::find(std::size_t k, double snr_db, const std::string& estimator) const {
    for (const auto& r : rows) {
        if (r.k == k && r.snr_db == snr_db && r.estimator == estimator) return &r;
    }
    return nullptr;
}

std::string ScatterTable::to_csv() const {
    std::ostringstream os;
    os << "trial,estimator,path,omega_r,omega_x,omega_y,omega_r_hat,omega_x_hat,omega_y_hat\n";
    for (const auto& r : rows) {
        os << r.trial << ',' << r.estimator << ',' << r.path;
        for (double v : r.truth) os << ',' << fmt(v);
        for (double v : r.estimate) os << ',' << fmt(v);
        os << '\n';
    }
    return os.str();
}

double ScatterTable::fraction_within(const std::string& estimator, double tol) const {
    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto& r : rows) {
        if (r.estimator != estimator) continue;
        for (std::size_t d = 0; d < 3; ++d) {
            ++total;
            hits += phase_distance(r.truth[d], r.estimate[d]) <= tol;
        }
    }
    if (auto it = failures.find(estimator); it != failures.end()) total += 3 * k * it->second;
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace fddest
