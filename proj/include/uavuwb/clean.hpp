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

#include <map>
#include <optional>
#include <span>

namespace uavuwb
{

struct CleanConfig
{
    /// Stop once the residual peak drops below this fraction of the reference peak.
    double stop_fraction = 0.10;

    /// 0 selects the default of 10 * window / T_s.
    std::size_t max_iterations = 0;

    /// Reference amplitude for the stop threshold. Unset: peak |sample| of the scan itself.
    /// Set it to the full-scale level when scans are normalized to a common input level.
    std::optional<double> reference_peak;

    double window_ns = constants::observation_window_ns;

    void validate() const
    {
        require(stop_fraction > 0.0 && stop_fraction < 1.0, "CleanConfig: stop_fraction must be in (0, 1)");
        require(!reference_peak || *reference_peak > 0.0, "CleanConfig: reference_peak must be > 0");
        require(window_ns > 0.0, "CleanConfig: window_ns must be > 0");
    }
};

struct CleanResult
{
    Cir cir;
    bool truncated = false;                 // max_iterations reached before the stop rule fired
    std::size_t iterations = 0;
    std::vector<double> residual_energy;    // entry 0 is the scan energy, then one per iteration
    std::vector<double> residual;
};

/// Serial-cancellation CLEAN. Each step picks the lag with the largest normalized
/// cross-correlation between residual and template, records the least-squares amplitude and
/// subtracts the scaled template. A tap at lag l means the template starts at sample l.
inline CleanResult clean_deconvolve(std::span<const double> scan, std::span<const double> templ, double t_s,
                                    const CleanConfig &cfg = {})
{
    cfg.validate();
    require(t_s > 0.0, "clean_deconvolve: t_s must be > 0");
    require(!templ.empty(), "clean_deconvolve: empty template");

    const std::size_t n = scan.size();
    const std::size_t L = templ.size();

    // prefix energy of the template, for lags where it runs past the end of the scan
    std::vector<double> w_energy(L + 1, 0.0);
    double w_peak = 0.0;
    for (std::size_t k = 0; k < L; ++k)
    {
        w_energy[k + 1] = w_energy[k] + templ[k] * templ[k];
        w_peak = std::max(w_peak, std::abs(templ[k]));
    }
    if (w_energy[L] <= 0.0)
        throw ValidationError("clean_deconvolve: template has zero energy");

    CleanResult out;
    out.cir.t_s = t_s;
    out.cir.t_window = std::max(cfg.window_ns, static_cast<double>(n) * t_s);
    out.residual.assign(scan.begin(), scan.end());
    auto &r = out.residual;

    auto energy_of = [](const std::vector<double> &v) {
        double e = 0.0;
        for (double x : v)
            e += x * x;
        return e;
    };
    auto peak_of = [](const std::vector<double> &v) {
        double p = 0.0;
        for (double x : v)
            p = std::max(p, std::abs(x));
        return p;
    };

    out.residual_energy.push_back(energy_of(r));
    const double reference = cfg.reference_peak.value_or(peak_of(r));
    if (n == 0 || reference == 0.0)
        return out;
    const double threshold = cfg.stop_fraction * reference;

    const std::size_t max_iter =
        cfg.max_iterations > 0 ? cfg.max_iterations
                               : static_cast<std::size_t>(std::ceil(10.0 * cfg.window_ns / t_s));

    auto overlap = [&](std::size_t lag) { return std::min(L, n - lag); };
    auto correlate = [&](std::size_t lag) {
        double c = 0.0;
        const std::size_t len = overlap(lag);
        for (std::size_t k = 0; k < len; ++k)
            c += r[lag + k] * templ[k];
        return c;
    };

    std::vector<double> corr(n);
    for (std::size_t lag = 0; lag < n; ++lag)
        corr[lag] = correlate(lag);

    std::map<std::size_t, double> amplitude_at;
    while (true)
    {
        if (peak_of(r) < threshold)
            break;
        if (out.iterations >= max_iter)
        {
            out.truncated = true;
            break;
        }

        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t lag = 0; lag < n; ++lag)
        {
            const double e = w_energy[overlap(lag)];
            if (e <= 0.0)
                continue;
            const double score = corr[lag] * corr[lag] / e;
            if (score > best_score)
            {
                best_score = score;
                best = lag;
            }
        }
        const std::size_t len = overlap(best);
        const double amp = corr[best] / w_energy[len];
        if (amp == 0.0)
            break;

        for (std::size_t k = 0; k < len; ++k)
            r[best + k] -= amp * templ[k];
        amplitude_at[best] += amp;
        ++out.iterations;
        out.residual_energy.push_back(energy_of(r));

        const std::size_t lo = best >= L ? best - L + 1 : 0;
        const std::size_t hi = std::min(n, best + L);
        for (std::size_t lag = lo; lag < hi; ++lag)
            corr[lag] = correlate(lag);
    }

    for (const auto &[lag, amp] : amplitude_at)
    {
        // samples whose reconstructed peak falls under the threshold are discarded
        if (std::abs(amp) * w_peak < threshold)
            continue;
        out.cir.taps.push_back({static_cast<double>(lag) * t_s, std::abs(amp), 0});
    }
    return out;
}

} // namespace uavuwb
