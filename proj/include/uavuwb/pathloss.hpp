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

#include "clean.hpp"
#include "params.hpp"

#include <optional>

namespace uavuwb
{

/// Lower clamp on dh / h_opt. The height term -10 log10(dh / h_opt) diverges as the receiver
/// approaches h_opt; with the default the term is capped at +20 dB.
///
/// Note: as written, the height term *raises* the loss as h_gnd -> h_opt, while h_opt is
/// described as the receiver height giving the lowest loss. The formula is implemented as
/// stated; callers who want the opposite sign can fold it into C_p.
inline constexpr double default_height_ratio_min = 1e-2;

/// Static-UAV path loss in dB: PL0 + 10 alpha log10(d/d0) - 10 log10(dh/h_opt) + C_p + S.
inline double path_loss_static(const Geometry &geom, const PathLossParams &p, std::optional<double> shadowing_db = {},
                               double ratio_min = default_height_ratio_min)
{
    geom.validate();
    p.validate();
    const double dh = std::abs(geom.h_gnd - geom.h_opt);
    const double ratio = std::max(dh / geom.h_opt, ratio_min);
    return p.pl0_db + 10.0 * p.alpha * std::log10(geom.d / geom.d0) - 10.0 * std::log10(ratio) + p.cp_db +
           shadowing_db.value_or(0.0);
}

/// Doppler-shifted frequency term 10 x log10((f_e + df) / f_e), df = (v / c) f_e.
inline double doppler_term_db(double v, const PathLossParams &p)
{
    // (f_e + df) / f_e = 1 + v / c; log1p keeps the ~1e-8 ratio exact
    return 10.0 * p.x * std::log1p(v / constants::speed_of_light) / std::numbers::ln10;
}

inline double path_loss_doppler(const Geometry &geom, const PathLossParams &p, std::optional<double> shadowing_db = {},
                                double ratio_min = default_height_ratio_min)
{
    return path_loss_static(geom, p, shadowing_db, ratio_min) + doppler_term_db(geom.v, p);
}

/// One zero-mean Gaussian shadowing draw in dB.
inline double draw_shadowing(const PathLossParams &p, RandomSource &rng) { return rng.normal(0.0, p.sigma_db); }

// ---- Measured path loss ----------------------------------------------------

/// Total energy of the average PDP, sum_i P_d[i] with P_d[i] = sum_k |h[i,k]|^2 / N_tot.
inline double average_pdp_energy(const ScanSet &set, const CleanConfig &cfg = {})
{
    set.validate();
    double e = 0.0;
    for (const auto &scan : set.scans)
        e += clean_deconvolve(scan, set.template_pulse, set.t_s, cfg).cir.energy();
    return e / static_cast<double>(set.scans.size());
}

/// PL(d) = PL(d0) + 10 log10(E_d0 / E_d) from two scan sets, each deconvolved with CLEAN.
inline double measured_path_loss(const ScanSet &ref, const ScanSet &at, double pl_d0_db, const CleanConfig &cfg = {})
{
    require(ref.t_s == at.t_s, "measured_path_loss: scan sets differ in T_s");
    require(!ref.scans.empty() && !at.scans.empty() && ref.scans.front().size() == at.scans.front().size(),
            "measured_path_loss: scan sets differ in window length");
    const double e0 = average_pdp_energy(ref, cfg);
    const double ed = average_pdp_energy(at, cfg);
    if (!(e0 > 0.0) || !(ed > 0.0))
        throw DegenerateInputError("measured_path_loss: zero total energy in a scan set");
    return pl_d0_db + 10.0 * std::log10(e0 / ed);
}

// ---- Fitting ---------------------------------------------------------------

struct PathLossSample
{
    double d = 1.0;      // m
    double pl_db = 0.0;
    EnvironmentClass env = EnvironmentClass::Open;
    ScenarioId scenario = ScenarioId::S2_Ground1m5;
    int v_mph = 0;
};

struct PathLossFit
{
    double alpha_hat = 0.0;
    double pl0_hat_db = 0.0;
    double sigma_hat_db = 0.0;
    std::vector<double> residuals;
};

/// Ordinary least squares of pl_db on 10 log10(d / d0). Height and C_p terms end up in the
/// intercept.
inline PathLossFit fit_path_loss(std::span<const PathLossSample> samples, double d0 = 1.0)
{
    require(d0 > 0.0, "fit_path_loss: d0 must be > 0");
    require(samples.size() >= 2, "fit_path_loss: needs at least 2 samples");

    const double n = static_cast<double>(samples.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> xs;
    xs.reserve(samples.size());
    for (const auto &s : samples)
    {
        require(s.d > 0.0 && std::isfinite(s.pl_db), "fit_path_loss: invalid sample");
        xs.push_back(10.0 * std::log10(s.d / d0));
        mx += xs.back();
        my += s.pl_db;
    }
    mx /= n;
    my /= n;

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (samples[i].pl_db - my);
    }
    if (!(sxx > 1e-12 * n))
        throw RankDeficientError("fit_path_loss: all distances are equal");

    PathLossFit fit;
    fit.alpha_hat = sxy / sxx;
    fit.pl0_hat_db = my - fit.alpha_hat * mx;
    fit.residuals.reserve(samples.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double r = samples[i].pl_db - (fit.pl0_hat_db + fit.alpha_hat * xs[i]);
        fit.residuals.push_back(r);
        ss += r * r;
    }
    fit.sigma_hat_db = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return fit;
}

/// Draws n samples from the static model over d ~ U[d_min, d_max] with Gaussian shadowing.
/// The geometry template supplies d0, heights and speed; its d is ignored.
inline std::vector<PathLossSample> generate_path_loss_samples(const ScenarioPreset &preset, const Geometry &geom,
                                                              std::size_t n, double d_min, double d_max,
                                                              RandomSource &rng)
{
    require(d_min > 0.0 && d_max >= d_min, "generate_path_loss_samples: invalid distance range");
    std::vector<PathLossSample> out;
    out.reserve(n);
    Geometry g = geom;
    for (std::size_t i = 0; i < n; ++i)
    {
        g.d = d_min + (d_max - d_min) * rng.uniform();
        const double s = draw_shadowing(preset.pl, rng);
        out.push_back({g.d, path_loss_static(g, preset.pl, s), preset.env, preset.scenario, preset.v_mph});
    }
    return out;
}

} // namespace uavuwb
