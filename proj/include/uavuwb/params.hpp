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

#include "core.hpp"

namespace uavuwb
{

struct PathLossParams
{
    double alpha = 2.0;
    double pl0_db = 0.0;
    double sigma_db = 0.0;
    double cp_db = 0.0;                                 // constant loss factor C_p, >= 0
    double x = 2.0;                                     // frequency dependence factor
    double f_e = constants::center_frequency_hz;        // Hz

    void validate() const
    {
        require(alpha > 0.0, "PathLossParams: alpha must be > 0");
        require(sigma_db >= 0.0, "PathLossParams: sigma_db must be >= 0");
        require(cp_db >= 0.0, "PathLossParams: cp_db must be >= 0");
        require(f_e > 0.0, "PathLossParams: f_e must be > 0");
    }
};

/// Saleh-Valenzuela parameters plus the height/delay coupling constants.
///
/// Per-cluster inter-cluster decay is realized as
///     mu_n = mu_scale * (c_d * Gamma_n + h / c_h) + psi,   psi ~ N(0, sigma_c^2),
/// and the cluster count as max(1, round(c_e / h + gamma)), gamma ~ N(0, sigma_N^2).
/// c_e and mu_scale are calibrated (see calibrate_sv_params) so that the tabulated mean cluster
/// count and the tabulated mu are reproduced.
struct SvParams
{
    double Lambda = 0.1;      // cluster arrival rate, 1/ns
    double lambda = 1.0;      // ray arrival rate, 1/ns
    double mu = 3.0;          // tabulated inter-cluster decay, ns
    double beta = 1.0;        // intra-cluster decay, ns
    double c_bar = 2.0;       // mean cluster count
    double c_d = 2.0;
    double c_h = 2.0;
    double c_e = 16.0;
    double sigma_c = 0.3;     // ns
    double sigma_N = 0.2;
    double mu_scale = 1.0;    // calibrated proportionality constant
    double mu_min = 0.1;      // ns, floor on realized mu_n
    double ray_floor_db = 40.0;

    void validate() const
    {
        require(Lambda > 0.0 && lambda > 0.0, "SvParams: arrival rates must be > 0");
        require(mu > 0.0 && beta > 0.0, "SvParams: decay constants must be > 0");
        require(c_bar > 0.0, "SvParams: c_bar must be > 0");
        require(c_d > 1.0 && c_h > 1.0 && c_e > 1.0, "SvParams: c_d, c_h, c_e must be > 1");
        require(sigma_c >= 0.0 && sigma_N >= 0.0, "SvParams: noise deviations must be >= 0");
        require(mu_scale > 0.0 && mu_min > 0.0, "SvParams: mu_scale and mu_min must be > 0");
        require(ray_floor_db > 0.0, "SvParams: ray_floor_db must be > 0");
    }
};

/// How the tabulated (eta, xi) describe the lognormal m-factor.
enum class MFactorScale
{
    Decibel,     // eta, xi are mean/std of 10*log10(m)
    NaturalLog,  // eta, xi are mean/std of ln(m)
};

struct NakagamiParams
{
    double eta = 0.0;
    double xi = 0.0;
    double m0 = 1.0;
    double v0 = 0.0;
    double m_min = 0.5;
    MFactorScale scale = MFactorScale::Decibel;

    void validate() const
    {
        require(xi >= 0.0, "NakagamiParams: xi must be >= 0");
        require(m_min > 0.0, "NakagamiParams: m_min must be > 0");
    }

    /// Location and scale of ln(m).
    double ln_location() const { return scale == MFactorScale::Decibel ? eta * std::numbers::ln10 / 10.0 : eta; }
    double ln_scale() const { return scale == MFactorScale::Decibel ? xi * std::numbers::ln10 / 10.0 : xi; }
};

struct ScenarioPreset
{
    EnvironmentClass env = EnvironmentClass::Open;
    ScenarioId scenario = ScenarioId::S2_Ground1m5;
    int v_mph = 0;
    PathLossParams pl;
    SvParams sv;
    NakagamiParams nak;

    /// Geometry with the scenario's receiver height and the preset speed.
    Geometry geometry(double d, double h_uav) const
    {
        Geometry g;
        g.d = d;
        g.h_uav = h_uav;
        g.h_gnd = receiver_height_m(scenario);
        g.v = v_mph * constants::mph_to_mps;
        return g;
    }

    std::string key() const
    {
        return std::string(to_string(env)) + "/" + std::string(to_string(scenario)) + "/v" + std::to_string(v_mph);
    }
};

} // namespace uavuwb
