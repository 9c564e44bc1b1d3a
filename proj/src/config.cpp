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

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fddest/harness.hpp"

namespace fddest {
namespace {

using nlohmann::json;

constexpr unsigned kMaxGridBits = 21;

bool is_count(double v) { return std::isfinite(v) && v >= 1.0 && v == std::floor(v); }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    require(j.is_object(), where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        require(known, where + ": unknown key '" + key + "'");
    }
}

channel::PhaseRange read_range(const json& j) {
    require(j.is_array() && j.size() == 2, "phase range must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string to_string(ScenarioMode m) {
    switch (m) {
        case ScenarioMode::paper_fixed: return "paper_fixed";
        case ScenarioMode::grid: return "grid";
        case ScenarioMode::random: return "random";
    }
    return "?";
}

}  // namespace

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::rice: return "rice";
        case Estimator::ricer: return "ricer";
        case Estimator::omp: return "omp";
        case Estimator::benchmark: return "benchmark";
        case Estimator::ls: return "ls";
        case Estimator::genie: return "genie";
    }
    return "?";
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::snr: return "snr";
        case SweepAxis::k: return "k";
        case SweepAxis::m_r: return "mr";
    }
    return "?";
}

Estimator estimator_from_string(const std::string& name) {
    for (Estimator e : {Estimator::rice, Estimator::ricer, Estimator::omp, Estimator::benchmark, Estimator::ls,
                        Estimator::genie}) {
        if (to_string(e) == name) return e;
    }
    throw std::invalid_argument("unknown estimator: " + name);
}

SweepAxis axis_from_string(const std::string& name) {
    if (name == "snr") return SweepAxis::snr;
    if (name == "k") return SweepAxis::k;
    if (name == "mr" || name == "m_r") return SweepAxis::m_r;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

ScenarioMode mode_from_string(const std::string& name) {
    if (name == "paper_fixed") return ScenarioMode::paper_fixed;
    if (name == "grid") return ScenarioMode::grid;
    if (name == "random") return ScenarioMode::random;
    throw std::invalid_argument("unknown scenario mode: " + name);
}

void ExperimentConfig::validate() const {
    geometry.validate();
    require(l >= 2, "l must be at least 2");
    require(trials >= 1, "trials must be at least 1");
    require(!values.empty(), "sweep values must be nonempty");
    require(!estimators.empty(), "estimator set must be nonempty");
    require(std::set<Estimator>(estimators.begin(), estimators.end()).size() == estimators.size(),
            "estimator set has duplicates");
    require(paired_k.empty() || paired_k.size() == values.size(), "paired_k must match the sweep values");
    require(std::all_of(paired_k.begin(), paired_k.end(), [](std::size_t v) { return v >= 1; }),
            "paired_k entries must be positive");
    require(k >= 1 || axis == SweepAxis::k, "k must be positive");
    for (double v : values) {
        require(std::isfinite(v) || (axis == SweepAxis::snr && v > 0), "sweep values must be finite");
        if (axis != SweepAxis::snr) require(is_count(v), "k and mr sweep values must be positive integers");
    }
    if (mode == ScenarioMode::paper_fixed) {
        require(preset_scenario == "fig2a" || preset_scenario == "fig2b",
                "paper_fixed mode needs preset_scenario fig2a or fig2b");
    }
    require(omp_grid.bits_r >= 1 && omp_grid.bits_t >= 1 && omp_grid.bits_p >= 1, "omp grid bits must be positive");
    require(omp_grid.bits_r + omp_grid.bits_t + omp_grid.bits_p <= kMaxGridBits, "omp grid is too large");
    require(ber_symbols >= 1, "ber_symbols must be positive");
    require(scenario.min_sep >= 0.0 && scenario.mean_power > 0.0, "scenario options out of range");
}

namespace config {

Preset preset(const std::string& name) {
    Preset p{RunKind::sweep, ExperimentConfig{}, ""};
    ExperimentConfig& c = p.cfg;
    if (name == "fig2a" || name == "fig2b") {
        const bool small = name == "fig2a";
        p.kind = RunKind::scatter;
        c.geometry = {small ? 3u : 4u, 10, 10, 0.5};
        c.k = small ? 4 : 8;
        c.values = {small ? 20.0 : 30.0};
        c.estimators = {Estimator::rice, Estimator::ricer};
        c.mode = ScenarioMode::paper_fixed;
        c.preset_scenario = name;
        c.trials = 100;
    } else if (name == "fig3") {
        c.geometry = {4, 10, 10, 0.5};
        c.k = 4;
        c.values = {0, 5, 10, 15, 20};
    } else if (name == "fig5") {
        c.geometry = {3, 10, 10, 0.5};
        c.l = 3;
        c.snr_db = 10;
        c.axis = SweepAxis::k;
        c.values = {1, 2, 3, 4, 5, 6};
        p.note = "uses M_r=3 with N_x=N_y=6 so that K=6 is the identifiability bound";
    } else if (name == "fig6") {
        c.geometry = {2, 10, 10, 0.5};
        c.l = 3;
        c.snr_db = 10;
        c.axis = SweepAxis::m_r;
        c.values = {2, 3, 4, 5, 6, 7};
        c.paired_k = {5, 6, 7, 8, 9, 10};
    } else if (name == "fig7") {
        p.kind = RunKind::ber;
        c.geometry = {3, 10, 10, 0.5};
        c.l = 2;
        c.ber_k_values = {3, 4};
        c.k = 3;
        c.values = {0, 5, 10, 15, 20, 25};
        c.estimators = {Estimator::rice, Estimator::ricer, Estimator::omp, Estimator::ls, Estimator::genie};
        c.trials = 50;
        p.note = "published N_x=N_y=2 violates L >= 2; using N_x=N_y=4";
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return p;
}

ExperimentConfig from_json(const std::string& text, ExperimentConfig base) {
    ExperimentConfig c = std::move(base);
    try {
        const json j = json::parse(text);
        check_keys(j,
                   {"geometry", "l", "k", "snr_db", "estimators", "axis", "values", "paired_k", "trials", "seed",
                    "snr_reference", "mode", "preset_scenario", "scenario", "omp_grid", "sharing", "ber_symbols", "ber_k_values",
                    "record_timing", "threads", "output_path"},
                   "config");
        if (auto g = j.find("geometry"); g != j.end()) {
            check_keys(*g, {"m_r", "m_x", "m_y", "spacing_ratio"}, "geometry");
            read(*g, "m_r", c.geometry.m_r);
            read(*g, "m_x", c.geometry.m_x);
            read(*g, "m_y", c.geometry.m_y);
            read(*g, "spacing_ratio", c.geometry.spacing_ratio);
        }
        read(j, "l", c.l);
        read(j, "k", c.k);
        read(j, "snr_db", c.snr_db);
        if (auto r = j.find("snr_reference"); r != j.end()) {
            const auto v = r->get<std::string>();
            require(v == "received" || v == "per_antenna", "snr_reference must be received or per_antenna");
            c.snr_reference = v == "received" ? channel::SnrReference::received : channel::SnrReference::per_antenna;
        }
        if (auto e = j.find("estimators"); e != j.end()) {
            c.estimators.clear();
            for (const auto& name : *e) c.estimators.push_back(estimator_from_string(name.get<std::string>()));
        }
        if (auto a = j.find("axis"); a != j.end()) c.axis = axis_from_string(a->get<std::string>());
        read(j, "values", c.values);
        read(j, "paired_k", c.paired_k);
        read(j, "trials", c.trials);
        read(j, "seed", c.seed);
        if (auto m = j.find("mode"); m != j.end()) c.mode = mode_from_string(m->get<std::string>());
        read(j, "preset_scenario", c.preset_scenario);
        if (auto s = j.find("scenario"); s != j.end()) {
            check_keys(*s, {"range_r", "range_x", "range_y", "min_sep", "rician_k_db", "mean_power"}, "scenario");
            if (s->contains("range_r")) c.scenario.range_r = read_range((*s)["range_r"]);
            if (s->contains("range_x")) c.scenario.range_x = read_range((*s)["range_x"]);
            if (s->contains("range_y")) c.scenario.range_y = read_range((*s)["range_y"]);
            read(*s, "min_sep", c.scenario.min_sep);
            read(*s, "rician_k_db", c.scenario.rician_k_db);
            read(*s, "mean_power", c.scenario.mean_power);
        }
        if (auto g = j.find("omp_grid"); g != j.end()) {
            check_keys(*g, {"bits_r", "bits_t", "bits_p"}, "omp_grid");
            read(*g, "bits_r", c.omp_grid.bits_r);
            read(*g, "bits_t", c.omp_grid.bits_t);
            read(*g, "bits_p", c.omp_grid.bits_p);
        }
        if (auto s = j.find("sharing"); s != j.end()) {
            const auto v = s->get<std::string>();
            require(v == "shared" || v == "independent", "sharing must be shared or independent");
            c.sharing = v == "shared" ? SymbolSharing::shared : SymbolSharing::independent;
        }
        read(j, "ber_symbols", c.ber_symbols);
        read(j, "ber_k_values", c.ber_k_values);
        read(j, "record_timing", c.record_timing);
        read(j, "threads", c.threads);
        read(j, "output_path", c.output_path);
    } catch (const json::exception& ex) {
        throw std::invalid_argument(std::string("config: ") + ex.what());
    }
    c.validate();
    return c;
}

std::string to_json(const ExperimentConfig& c) {
    json j;
    j["geometry"] = {{"m_r", c.geometry.m_r},
                     {"m_x", c.geometry.m_x},
                     {"m_y", c.geometry.m_y},
                     {"spacing_ratio", c.geometry.spacing_ratio}};
    j["l"] = c.l;
    j["k"] = c.k;
    j["snr_db"] = c.snr_db;
    j["snr_reference"] = c.snr_reference == channel::SnrReference::received ? "received" : "per_antenna";
    j["estimators"] = json::array();
    for (Estimator e : c.estimators) j["estimators"].push_back(to_string(e));
    j["axis"] = to_string(c.axis);
    j["values"] = c.values;
    j["paired_k"] = c.paired_k;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["mode"] = to_string(c.mode);
    j["preset_scenario"] = c.preset_scenario;
    j["scenario"] = {{"range_r", {c.scenario.range_r.lo, c.scenario.range_r.hi}},
                     {"range_x", {c.scenario.range_x.lo, c.scenario.range_x.hi}},
                     {"range_y", {c.scenario.range_y.lo, c.scenario.range_y.hi}},
                     {"min_sep", c.scenario.min_sep},
                     {"rician_k_db", c.scenario.rician_k_db},
                     {"mean_power", c.scenario.mean_power}};
    j["omp_grid"] = {{"bits_r", c.omp_grid.bits_r}, {"bits_t", c.omp_grid.bits_t}, {"bits_p", c.omp_grid.bits_p}};
    j["sharing"] = c.sharing == SymbolSharing::shared ? "shared" : "independent";
    j["ber_symbols"] = c.ber_symbols;
    j["ber_k_values"] = c.ber_k_values;
    j["record_timing"] = c.record_timing;
    j["threads"] = c.threads;
    j["output_path"] = c.output_path;
    return j.dump(2);
}

}  // namespace config
}  // namespace fddest
