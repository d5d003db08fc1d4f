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

// Shared helpers for the unit and acceptance tests: a sampled UWB pulse, noiseless scan
// synthesis and independent reference evaluations.

#include "uavuwb/uavuwb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace testing_support
{

/// Second-derivative Gaussian pulse with unit peak, sampled at t_s over +-4 widths.
inline std::vector<double> monocycle(double t_s = 0.06, double width_ns = 0.25)
{
    const int half = static_cast<int>(std::ceil(4.0 * width_ns / t_s));
    std::vector<double> p;
    for (int k = -half; k <= half; ++k)
    {
        const double x = k * t_s / width_ns;
        p.push_back((1.0 - x * x) * std::exp(-0.5 * x * x));
    }
    return p;
}

/// Noiseless scan: sum of shifted, scaled copies of the template (template start at `lag`).
inline std::vector<double> synth_scan(const std::vector<std::pair<std::size_t, double>> &taps,
                                      const std::vector<double> &templ, std::size_t n)
{
    std::vector<double> s(n, 0.0);
    for (const auto &[lag, a] : taps)
        for (std::size_t k = 0; k < templ.size() && lag + k < n; ++k)
            s[lag + k] += a * templ[k];
    return s;
}

/// Mean excess delay and RMS spread straight from their definitions, in long double with a
/// central second moment.
struct BruteDelay
{
    long double t_mean, t_rms;
};

inline BruteDelay brute_delay_stats(const std::vector<std::pair<double, double>> &taps)
{
    long double p = 0, m = 0;
    if (std::all_of(taps.begin(), taps.end(), [&](const auto &x) { return x.first == taps.front().first; }))
        return {taps.front().first, 0.0L};
    for (const auto &[t, w] : taps)
    {
        p += w;
        m += static_cast<long double>(t) * w;
    }
    const long double mean = m / p;
    long double c = 0;
    for (const auto &[t, w] : taps)
        c += (t - mean) * (t - mean) * w;
    return {mean, std::sqrt(c / p)};
}

/// Great-circle distance from the haversine formula, written independently of the library.
inline double haversine_oracle(double lat1, double lon1, double lat2, double lon2, double r)
{
    const long double d2r = std::numbers::pi_v<long double> / 180.0L;
    const long double a1 = lat1 * d2r, a2 = lat2 * d2r;
    const long double dlat = (lat2 - lat1) * d2r, dlon = (lon2 - lon1) * d2r;
    const long double s1 = std::sin(dlat / 2), s2 = std::sin(dlon / 2);
    const long double h = s1 * s1 + std::cos(a1) * std::cos(a2) * s2 * s2;
    return static_cast<double>(2.0L * r * std::asin(std::sqrt(std::min(1.0L, h))));
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

/// Asymptotic KS critical value at significance 0.01.
inline double ks_critical_001(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

/// Ordinary least-squares slope of y on x.
inline double ols_slope(const std::vector<double> &x, const std::vector<double> &y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace testing_support
