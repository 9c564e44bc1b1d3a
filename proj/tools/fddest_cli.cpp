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

// Command-line driver for sweeps, BER runs and the preset experiments.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fddest/harness.hpp"
#include "fddest/rice.hpp"

namespace {

using namespace fddest;

constexpr int kExitConfig = 2;
constexpr int kExitAllFailed = 3;

struct Overrides {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::string out;
    bool timing = false;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point");
    cmd->add_option("--out", o.out, "CSV output path (stdout if omitted)");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
    cmd->add_flag("--timing", o.timing, "record per-estimator wall-clock seconds");
}

ExperimentConfig apply(ExperimentConfig cfg, const Overrides& o, CLI::App* cmd) {
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = config::from_json(buf.str(), cfg);
    }
    if (cmd->count("--seed")) cfg.seed = o.seed;
    if (cmd->count("--trials")) cfg.trials = o.trials;
    if (cmd->count("--out")) cfg.output_path = o.out;
    if (cmd->count("--threads")) cfg.threads = o.threads;
    if (o.timing) cfg.record_timing = true;
    cfg.validate();
    return cfg;
}

void emit(const std::string& csv, const std::string& path) {
    if (path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << csv;
}

int run(config::RunKind kind, const ExperimentConfig& cfg, const std::string& scatter_path) {
    switch (kind) {
        case config::RunKind::sweep: {
            const SweepTable t = harness::run_sweep(cfg);
            emit(t.to_csv(), cfg.output_path);
            return t.any_point_all_failed() ? kExitAllFailed : 0;
        }
        case config::RunKind::ber: {
            const BerTable t = harness::run_ber(cfg);
            emit(t.to_csv(), cfg.output_path);
            return t.any_point_all_failed() ? kExitAllFailed : 0;
        }
        case config::RunKind::scatter: {
            const ScatterTable t = harness::run_scatter(cfg);
            emit(t.to_csv(), scatter_path.empty() ? cfg.output_path : scatter_path);
            for (const auto& [name, failed] : t.failures) {
                std::cerr << name << ": " << t.fraction_within(name, 0.05) << " of phases within 0.05 rad, "
                          << failed << " failed trials\n";
                if (failed == cfg.trials) return kExitAllFailed;
            }
            return 0;
        }
    }
    return 0;
}

void print_identifiability(std::size_t mr_max, std::size_t n_max) {
    std::cout << "m_r,n_x,n_y,p_r,q_r,k_max\n";
    for (std::size_t m_r = 2; m_r <= mr_max; ++m_r) {
        for (std::size_t n = 4; n <= n_max; n += 2) {
            const SmoothingPlan plan = rice::plan_smoothing(m_r, n, n);
            std::cout << m_r << ',' << n << ',' << n << ',' << plan.p_r << ',' << plan.q_r << ',' << plan.k_max
                      << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fddest: structured-training FDD massive MIMO channel estimation"};
    app.require_subcommand(1);

    Overrides sweep_o;
    std::string axis = "snr";
    std::vector<std::string> estimators;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "NMSE sweep over snr, k or mr");
    add_common(sweep, sweep_o);
    sweep->add_option("--axis", axis, "sweep axis")->check(CLI::IsMember({"snr", "k", "mr"}));
    sweep->add_option("--values", values, "sweep values")->delimiter(',');
    sweep->add_option("--estimators", estimators, "rice ricer omp benchmark ls genie")->delimiter(',');

    Overrides ber_o;
    auto* ber = app.add_subcommand("ber", "zero-forcing QPSK bit error rate over snr");
    add_common(ber, ber_o);

    std::size_t id_mr = 8;
    std::size_t id_n = 10;
    auto* ident = app.add_subcommand("identifiability", "print the K_max table");
    ident->add_option("--max-mr", id_mr, "largest receive array");
    ident->add_option("--max-n", id_n, "largest N_x = N_y (even)");

    Overrides preset_o;
    std::string preset_name;
    std::string scatter_path;
    auto* pre = app.add_subcommand("preset", "run a published experiment setup");
    pre->add_option("name", preset_name, "preset name")
        ->required()
        ->check(CLI::IsMember({"fig2a", "fig2b", "fig3", "fig5", "fig6", "fig7"}));
    pre->add_option("--scatter", scatter_path, "scatter CSV path for fig2a/fig2b");
    add_common(pre, preset_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*ident) {
            print_identifiability(id_mr, id_n);
            return 0;
        }
        if (*sweep) {
            ExperimentConfig cfg;
            cfg.axis = axis_from_string(axis);
            if (cfg.axis != SweepAxis::snr) cfg.values.clear();
            if (!values.empty()) cfg.values = values;
            if (!estimators.empty()) {
                cfg.estimators.clear();
                for (const auto& e : estimators) cfg.estimators.push_back(estimator_from_string(e));
            }
            return run(config::RunKind::sweep, apply(cfg, sweep_o, sweep), "");
        }
        if (*ber) {
            config::Preset p = config::preset("fig7");
            return run(config::RunKind::ber, apply(p.cfg, ber_o, ber), "");
        }
        config::Preset p = config::preset(preset_name);
        if (!p.note.empty()) std::cerr << "note: " << p.note << '\n';
        return run(p.kind, apply(p.cfg, preset_o, pre), scatter_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
