// SPDX-License-Identifier: Apache-2.0
//
// uavuwb - UWB air-to-ground channel simulation and parameter estimation
// Copyright (C) 2026 uavuwb contributors
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

#include "sv_generator.hpp"

#include <array>

namespace uavuwb
{

/// Tabulated large-scale fit for one (env, scenario, speed) combination.
struct PathLossRow
{
    EnvironmentClass env;
    ScenarioId scenario;
    int v_mph;
    double alpha;
    double pl0_db;
    double sigma_db;
};

/// Tabulated multipath parameters for one (env, scenario).
struct PdpRow
{
    EnvironmentClass env;
    ScenarioId scenario;
    double c_bar;
    double Lambda;  // 1/ns
    double lambda;  // 1/ns
    double mu;      // ns
    double beta;    // ns
};

/// Tabulated small-scale fading parameters for one (env, scenario).
struct SmallScaleRow
{
    EnvironmentClass env;
    ScenarioId scenario;
    double eta;  // dB
    double xi;
};

namespace tables
{
using E = EnvironmentClass;
using S = ScenarioId;

// Path loss parameters, d = 5.6 m to 16.5 m (open area, then sub-urban area).
inline constexpr std::array<PathLossRow, 12> path_loss{{
    {E::Open, S::S1_Foliage, 0, 2.6471, 34.905, 3.37},
    {E::Open, S::S2_Ground1m5, 0, 2.5418, 24.9965, 3.06},
    {E::Open, S::S3_Ground7cm, 0, 2.9442, 25.8091, 2.799},
    {E::Open, S::S1_Foliage, 20, 2.6533, 34.906, 4.02},
    {E::Open, S::S2_Ground1m5, 20, 2.6621, 24.996, 3.91},
    {E::Open, S::S3_Ground7cm, 20, 2.9423, 25.809, 3.44},
    {E::SubUrban, S::S1_Foliage, 0, 2.7601, 30.4459, 4.8739},
    {E::SubUrban, S::S2_Ground1m5, 0, 2.606, 24.747, 4.31},
    {E::SubUrban, S::S3_Ground7cm, 0, 3.0374, 21.96, 4.897},
    {E::SubUrban, S::S1_Foliage, 20, 2.8350, 30.446, 5.3},
    {E::SubUrban, S::S2_Ground1m5, 20, 2.667, 24.833, 4.96},
    {E::SubUrban, S::S3_Ground7cm, 20, 2.961, 22.73, 4.71},
}};

// Channel model parameters for PDP.
inline constexpr std::array<PdpRow, 6> pdp{{
    {E::Open, S::S1_Foliage, 2.33, 0.15, 4.34, 2.5, 0.5},
    {E::Open, S::S2_Ground1m5, 2.33, 0.09, 2.210, 2.91, 0.9069},
    {E::Open, S::S3_Ground7cm, 1.0, 0.0498, 0.532, 4.42, 1.21},
    {E::SubUrban, S::S1_Foliage, 2.66, 0.789, 0.827, 2.63, 0.9},
    {E::SubUrban, S::S2_Ground1m5, 2.66, 0.0498, 0.717, 2.77, 1.4},
    {E::SubUrban, S::S3_Ground7cm, 2.66, 0.06, 0.615, 3.03, 1.6},
}};

// Channel model parameters for small scale fading.
inline constexpr std::array<SmallScaleRow, 6> small_scale{{
    {E::Open, S::S1_Foliage, 1.36, 2.19},
    {E::Open, S::S2_Ground1m5, 1.67, 0.64},
    {E::Open, S::S3_Ground7cm, 1.45, 0.79},
    {E::SubUrban, S::S1_Foliage, 1.12, 2.705},
    {E::SubUrban, S::S2_Ground1m5, 1.58, 1.55},
    {E::SubUrban, S::S3_Ground7cm, 1.34, 1.471},
}};
} // namespace tables

inline const PathLossRow *find_path_loss_row(EnvironmentClass env, ScenarioId scenario, int v_mph)
{
    for (const auto &r : tables::path_loss)
        if (r.env == env && r.scenario == scenario && r.v_mph == v_mph)
            return &r;
    return nullptr;
}

inline const PdpRow *find_pdp_row(EnvironmentClass env, ScenarioId scenario)
{
    for (const auto &r : tables::pdp)
        if (r.env == env && r.scenario == scenario)
            return &r;
    return nullptr;
}

inline const SmallScaleRow *find_small_scale_row(EnvironmentClass env, ScenarioId scenario)
{
    for (const auto &r : tables::small_scale)
        if (r.env == env && r.scenario == scenario)
            return &r;
    return nullptr;
}

namespace detail
{
inline ScenarioPreset build_preset(const PathLossRow &pl, const PdpRow &pdp, const SmallScaleRow &ss)
{
    ScenarioPreset p;
    p.env = pl.env;
    p.scenario = pl.scenario;
    p.v_mph = pl.v_mph;
    p.pl.alpha = pl.alpha;
    p.pl.pl0_db = pl.pl0_db;
    p.pl.sigma_db = pl.sigma_db;

    SvParams sv;
    sv.Lambda = pdp.Lambda;
    sv.lambda = pdp.lambda;
    sv.mu = pdp.mu;
    sv.beta = pdp.beta;
    sv.c_bar = pdp.c_bar;
    p.sv = calibrate_sv_params(sv);

    p.nak.eta = ss.eta;
    p.nak.xi = ss.xi;
    // first-component statistics are not tabulated; use the lognormal median and variance
    const double loc = p.nak.ln_location(), sc = p.nak.ln_scale();
    p.nak.m0 = std::exp(loc);
    p.nak.v0 = (std::exp(sc * sc) - 1.0) * std::exp(2.0 * loc + sc * sc);
    return p;
}

inline const std::array<ScenarioPreset, 12> &registry()
{
    static const std::array<ScenarioPreset, 12> presets = [] {
        std::array<ScenarioPreset, 12> out;
        for (std::size_t i = 0; i < tables::path_loss.size(); ++i)
        {
            const auto &pl = tables::path_loss[i];
            out[i] = build_preset(pl, *find_pdp_row(pl.env, pl.scenario), *find_small_scale_row(pl.env, pl.scenario));
        }
        return out;
    }();
    return presets;
}
} // namespace detail

/// All 12 (env, scenario, speed) presets, in table order. Built once, immutable.
inline std::span<const ScenarioPreset> all_presets() { return detail::registry(); }

inline const ScenarioPreset &preset_lookup(EnvironmentClass env, ScenarioId scenario, int v_mph)
{
    if (v_mph != 0 && v_mph != 20)
        throw PresetNotFoundError("no preset for v_mph=" + std::to_string(v_mph) + " (expected 0 or 20)");
    for (const auto &p : detail::registry())
        if (p.env == env && p.scenario == scenario && p.v_mph == v_mph)
            return p;
    throw PresetNotFoundError("no preset for " + std::string(to_string(env)) + "/" + std::string(to_string(scenario)));
}

/// Parses "open/s2/v0" style keys.
inline const ScenarioPreset &preset_lookup(std::string_view key)
{
    const auto a = key.find('/');
    const auto b = key.find('/', a == std::string_view::npos ? a : a + 1);
    if (a == std::string_view::npos || b == std::string_view::npos || key.substr(b + 1).size() < 2 ||
        key[b + 1] != 'v')
        throw PresetNotFoundError("malformed preset key '" + std::string(key) + "' (expected env/sN/vM)");
    int v = 0;
    try
    {
        v = std::stoi(std::string(key.substr(b + 2)));
    }
    catch (const std::exception &)
    {
        throw PresetNotFoundError("malformed preset key '" + std::string(key) + "'");
    }
    try
    {
        return preset_lookup(parse_environment(key.substr(0, a)), parse_scenario(key.substr(a + 1, b - a - 1)), v);
    }
    catch (const ValidationError &e)
    {
        throw PresetNotFoundError(e.what());
    }
}

} // namespace uavuwb
