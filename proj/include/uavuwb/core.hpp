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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavuwb
{

// ---- Errors ---------------------------------------------------------------

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
struct ValidationError : Error
{
    using Error::Error;
};

/// Input is well-formed but carries no usable signal (zero energy, empty profile, ...).
struct DegenerateInputError : Error
{
    using Error::Error;
};

struct PresetNotFoundError : Error
{
    using Error::Error;
};

/// Regression design matrix has no spread in the regressor.
struct RankDeficientError : Error
{
    using Error::Error;
};

inline void require(bool condition, const std::string &what)
{
    if (!condition)
        throw ValidationError(what);
}

// ---- Units and constants --------------------------------------------------
//
// Internal convention: delays in ns, frequencies in Hz, distances in m,
// powers linear. dB appears only at API boundaries.

namespace constants
{
inline constexpr double speed_of_light = 299792458.0;     // m/s
inline constexpr double sample_period_ns = 0.06;           // T_s
inline constexpr double observation_window_ns = 100.0;     // T
inline constexpr int scans_per_set = 25;                   // N_tot
inline constexpr double band_low_hz = 3.1e9;
inline constexpr double band_high_hz = 5.3e9;
inline constexpr double center_frequency_hz = 4.3e9;
inline constexpr double pulse_repetition_hz = 10.1e6;
inline constexpr double max_tx_power_dbm = -14.5;
inline constexpr double mph_to_mps = 0.44704;
inline constexpr double earth_radius_m = 6371000.0;
} // namespace constants

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// floor(T/T_s) with a small guard so that exact multiples are not lost to rounding.
inline std::size_t grid_length(double window_ns, double sample_period_ns)
{
    return static_cast<std::size_t>(std::floor(window_ns / sample_period_ns + 1e-9));
}

// ---- Scenario keys ---------------------------------------------------------

enum class EnvironmentClass
{
    Open,
    SubUrban
};

enum class ScenarioId
{
    S1_Foliage,
    S2_Ground1m5,
    S3_Ground7cm
};

inline std::string_view to_string(EnvironmentClass env)
{
    return env == EnvironmentClass::Open ? "open" : "suburban";
}

inline std::string_view to_string(ScenarioId s)
{
    switch (s)
    {
    case ScenarioId::S1_Foliage:
        return "s1";
    case ScenarioId::S2_Ground1m5:
        return "s2";
    case ScenarioId::S3_Ground7cm:
        return "s3";
    }
    return "?";
}

inline EnvironmentClass parse_environment(std::string_view s)
{
    if (s == "open")
        return EnvironmentClass::Open;
    if (s == "suburban")
        return EnvironmentClass::SubUrban;
    throw ValidationError("unknown environment '" + std::string(s) + "' (expected open|suburban)");
}

/// Accepts "s1".."s3" or "1".."3".
inline ScenarioId parse_scenario(std::string_view s)
{
    if (s == "s1" || s == "1")
        return ScenarioId::S1_Foliage;
    if (s == "s2" || s == "2")
        return ScenarioId::S2_Ground1m5;
    if (s == "s3" || s == "3")
        return ScenarioId::S3_Ground7cm;
    throw ValidationError("unknown scenario '" + std::string(s) + "' (expected s1|s2|s3)");
}

inline int scenario_number(ScenarioId s) { return static_cast<int>(s) + 1; }

inline bool has_foliage(ScenarioId s) { return s == ScenarioId::S1_Foliage; }

/// Receiver height above ground for each scenario (m).
inline double receiver_height_m(ScenarioId s)
{
    return s == ScenarioId::S3_Ground7cm ? 0.07 : 1.5;
}

// ---- Geometry --------------------------------------------------------------

struct Geometry
{
    double d = 1.0;      // link distance, m
    double d0 = 1.0;     // reference distance, m
    double h_uav = 8.0;  // m
    double h_gnd = 1.5;  // m
    double h_opt = 1.5;  // m; not stated numerically in the source data, configurable
    double v = 0.0;      // m/s

    void validate() const
    {
        require(d > 0.0, "Geometry: d must be > 0");
        require(d0 > 0.0, "Geometry: d0 must be > 0");
        require(h_uav > 0.0, "Geometry: h_uav must be > 0");
        require(h_gnd >= 0.0, "Geometry: h_gnd must be >= 0");
        require(h_opt > 0.0, "Geometry: h_opt must be > 0");
        require(v >= 0.0, "Geometry: v must be >= 0");
    }
};

/// Great-circle distance between two (lat, lon) points in degrees, haversine formula.
inline double spherical_distance(double lat1, double lon1, double lat2, double lon2,
                                 double radius = constants::earth_radius_m)
{
    auto check_lat = [](double lat) { require(lat >= -90.0 && lat <= 90.0, "latitude out of [-90, 90]"); };
    auto check_lon = [](double lon) { require(lon >= -180.0 && lon <= 180.0, "longitude out of [-180, 180]"); };
    check_lat(lat1), check_lat(lat2), check_lon(lon1), check_lon(lon2);
    require(radius > 0.0, "radius must be > 0");

    constexpr double deg = std::numbers::pi / 180.0;
    const double dphi = (lat2 - lat1) * deg;
    const double dlambda = (lon2 - lon1) * deg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double a = s1 * s1 + std::cos(lat1 * deg) * std::cos(lat2 * deg) * s2 * s2;
    a = std::clamp(a, 0.0, 1.0);
    return 2.0 * radius * std::asin(std::sqrt(a));
}

// ---- Channel impulse response ---------------------------------------------

struct Tap
{
    double tau = 0.0;  // ns
    double a = 0.0;    // linear amplitude, phase dropped
    int cluster = 0;

    bool operator==(const Tap &) const = default;
};

/// Sparse channel impulse response.
struct Cir
{
    std::vector<Tap> taps;
    double t_s = constants::sample_period_ns;
    double t_window = constants::observation_window_ns;

    double energy() const
    {
        double e = 0.0;
        for (const auto &t : taps)
            e += t.a * t.a;
        return e;
    }

    bool operator==(const Cir &) const = default;
};

/// Shared validator for every Cir produced in the library.
inline void validate(const Cir &cir)
{
    require(cir.t_s > 0.0, "Cir: t_s must be > 0");
    require(cir.t_window > 0.0, "Cir: t_window must be > 0");
    for (std::size_t i = 0; i < cir.taps.size(); ++i)
    {
        const auto &t = cir.taps[i];
        require(std::isfinite(t.tau) && std::isfinite(t.a), "Cir: non-finite tap");
        require(t.tau >= 0.0 && t.tau < cir.t_window, "Cir: tap delay outside [0, t_window)");
        require(t.a >= 0.0, "Cir: negative amplitude");
        if (i > 0)
            require(cir.taps[i - 1].tau < t.tau, "Cir: tap delays not strictly ascending");
    }
}

// ---- Power delay profile ---------------------------------------------------

struct PdpBin
{
    double t = 0.0;  // ns
    double p = 0.0;  // linear power
};

/// Power versus delay. Grid profiles use t = i * T_s; sparse profiles carry physical delays
/// and, when produced by the generator, the cluster label of each bin.
struct Pdp
{
    std::vector<PdpBin> bins;
    std::vector<int> cluster;    // empty or same length as bins
    double normalization = 1.0;  // total energy (linear) the stored bins were divided by

    double total_power() const
    {
        double s = 0.0;
        for (const auto &b : bins)
            s += b.p;
        return s;
    }
};

inline void validate(const Pdp &pdp)
{
    require(pdp.cluster.empty() || pdp.cluster.size() == pdp.bins.size(), "Pdp: cluster labels size mismatch");
    for (std::size_t i = 0; i < pdp.bins.size(); ++i)
    {
        require(std::isfinite(pdp.bins[i].p) && pdp.bins[i].p >= 0.0, "Pdp: negative or non-finite power");
        if (i > 0)
            require(pdp.bins[i - 1].t <= pdp.bins[i].t, "Pdp: bins not sorted by delay");
    }
}

// ---- Scan sets -------------------------------------------------------------

struct ScanSet
{
    std::vector<std::vector<double>> scans;
    std::vector<double> template_pulse;
    double t_s = constants::sample_period_ns;
    Geometry geometry;
    EnvironmentClass env = EnvironmentClass::Open;
    ScenarioId scenario = ScenarioId::S2_Ground1m5;

    void validate() const
    {
        require(!scans.empty(), "ScanSet: needs at least one scan");
        for (const auto &s : scans)
            require(s.size() == scans.front().size(), "ScanSet: scans differ in length");
        require(std::any_of(template_pulse.begin(), template_pulse.end(), [](double v) { return v != 0.0; }),
                "ScanSet: template pulse is all zeros");
        require(t_s > 0.0, "ScanSet: t_s must be > 0");
    }
};

// ---- Random source ---------------------------------------------------------

namespace detail
{
inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; all distributions are implemented here rather than taken from <random> because the
/// standard distributions are implementation-defined.
class RandomSource
{
  public:
    RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(detail::splitmix64(seed ^ detail::splitmix64(stream + 0x5851f42d4c957f2dULL)))
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }

    /// Standard normal, Marsaglia polar method.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do
        {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

    /// Gamma(shape, scale), Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
    double gamma(double shape, double scale)
    {
        if (shape < 1.0)
        {
            const double g = gamma(shape + 1.0, 1.0);
            return scale * g * std::pow(uniform_open0(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;)
        {
            double x, v;
            do
            {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open0();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return scale * d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return scale * d * v;
        }
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace uavuwb
