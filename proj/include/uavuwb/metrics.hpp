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

#include <bit>
#include <complex>
#include <fftw3.h>
#include <memory>
#include <numeric>

namespace uavuwb
{

// ---- PDP averaging ---------------------------------------------------------

/// Grid index of a delay: nearest multiple of t_s, clamped into the grid.
inline std::size_t grid_index(double tau, double t_s, std::size_t n_bins)
{
    const auto i = static_cast<std::size_t>(std::llround(tau / t_s));
    return std::min(i, n_bins - 1);
}

/// Average PDP on the T_s grid: P[i] = sum_k |h[i,k]|^2 / N.
inline Pdp average_pdp(std::span<const Cir> cirs)
{
    require(!cirs.empty(), "average_pdp: empty ensemble");
    const double t_s = cirs.front().t_s;
    const double t_window = cirs.front().t_window;
    for (const auto &c : cirs)
    {
        require(c.t_s == t_s && c.t_window == t_window, "average_pdp: CIRs on mismatched grids");
        validate(c);
    }
    const std::size_t n = grid_length(t_window, t_s);
    require(n > 0, "average_pdp: empty grid");

    Pdp pdp;
    pdp.bins.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        pdp.bins[i].t = static_cast<double>(i) * t_s;
    const double inv = 1.0 / static_cast<double>(cirs.size());
    for (const auto &c : cirs)
        for (const auto &tap : c.taps)
            pdp.bins[grid_index(tap.tau, t_s, n)].p += tap.a * tap.a * inv;
    return pdp;
}

/// Deconvolves each scan with CLEAN, then averages.
inline Pdp average_pdp(const ScanSet &set, const CleanConfig &cfg = {})
{
    set.validate();
    std::vector<Cir> cirs;
    cirs.reserve(set.scans.size());
    for (const auto &scan : set.scans)
        cirs.push_back(clean_deconvolve(scan, set.template_pulse, set.t_s, cfg).cir);
    return average_pdp(cirs);
}

/// Single-CIR profile with physical delays.
inline Pdp sparse_pdp(const Cir &cir)
{
    Pdp pdp;
    for (const auto &t : cir.taps)
    {
        pdp.bins.push_back({t.tau, t.a * t.a});
        pdp.cluster.push_back(t.cluster);
    }
    return pdp;
}

// ---- Delay statistics ------------------------------------------------------

struct DelayStats
{
    double t_mean = 0.0;  // ns
    double t_rms = 0.0;   // ns
    double t_sq = 0.0;    // ns^2
    double cb_hz = std::numeric_limits<double>::infinity();
};

/// CB = 1 / (5 t_rms); +inf when t_rms is 0.
inline double coherence_bandwidth_hz(double t_rms_ns)
{
    return t_rms_ns > 0.0 ? 1e9 / (5.0 * t_rms_ns) : std::numeric_limits<double>::infinity();
}

/// Mean excess delay, RMS delay spread and coherence bandwidth of a profile. Uses the stored
/// bin delays, which for grid profiles are i * T_s. The spread is accumulated about the mean
/// (second pass) rather than as t_sq - t_mean^2, which cancels badly for late, compact profiles.
inline DelayStats delay_stats(const Pdp &pdp)
{
    validate(pdp);
    double total = 0.0, m1 = 0.0, m2 = 0.0;
    bool point_mass = true;
    const PdpBin *first = nullptr;
    for (const auto &b : pdp.bins)
    {
        total += b.p;
        m1 += b.t * b.p;
        m2 += b.t * b.t * b.p;
        if (b.p > 0.0)
        {
            if (first && b.t != first->t)
                point_mass = false;
            if (!first)
                first = &b;
        }
    }
    if (!(total > 0.0))
        throw DegenerateInputError("delay_stats: zero total power");

    DelayStats s;
    if (point_mass)
    {
        s.t_mean = first->t;
        s.t_sq = first->t * first->t;
        s.t_rms = 0.0;
        return s;
    }
    s.t_mean = m1 / total;
    double central = 0.0;
    for (const auto &b : pdp.bins)
        central += (b.t - s.t_mean) * (b.t - s.t_mean) * b.p;
    s.t_rms = std::sqrt(central / total);
    s.t_sq = std::max(m2 / total, s.t_mean * s.t_mean);
    s.cb_hz = coherence_bandwidth_hz(s.t_rms);
    return s;
}

// ---- MPC thresholding ------------------------------------------------------

/// Default MPC noise floor relative to the strongest tap.
inline constexpr double default_mpc_threshold_db = -32.5;

/// Drops taps whose power is more than |threshold_db| below the strongest tap.
inline Cir threshold_taps(const Cir &cir, double threshold_db = default_mpc_threshold_db)
{
    Cir out = cir;
    double peak = 0.0;
    for (const auto &t : cir.taps)
        peak = std::max(peak, t.a * t.a);
    const double floor = peak * db_to_linear(threshold_db);
    std::erase_if(out.taps, [&](const Tap &t) { return t.a * t.a < floor || t.a == 0.0; });
    return out;
}

/// Empirical CDF of MPC arrival times pooled over an ensemble, after thresholding each CIR.
inline std::vector<std::pair<double, double>> toa_cdf(std::span<const Cir> ensemble,
                                                      double threshold_db = default_mpc_threshold_db)
{
    std::vector<double> toa;
    for (const auto &c : ensemble)
        for (const auto &t : threshold_taps(c, threshold_db).taps)
            toa.push_back(t.tau);
    std::sort(toa.begin(), toa.end());
    std::vector<std::pair<double, double>> cdf;
    const double n = static_cast<double>(toa.size());
    for (std::size_t i = 0; i < toa.size(); ++i)
    {
        if (i + 1 < toa.size() && toa[i + 1] == toa[i])
            continue;
        cdf.emplace_back(toa[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

// ---- Frequency domain ------------------------------------------------------

/// Real-input DFT of fixed size backed by an FFTW plan. Not thread-safe; one per worker.
class RealDft
{
  public:
    explicit RealDft(std::size_t n) : n_(n)
    {
        require(n > 0, "RealDft: size must be > 0");
        in_ = static_cast<double *>(fftw_malloc(sizeof(double) * n));
        out_ = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    RealDft(const RealDft &) = delete;
    RealDft &operator=(const RealDft &) = delete;
    ~RealDft()
    {
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }

    std::size_t size() const { return n_; }

    /// Full-length spectrum of a real sequence (zero-padded or truncated to size()).
    std::vector<std::complex<double>> forward(std::span<const double> x)
    {
        std::fill(in_, in_ + n_, 0.0);
        std::copy_n(x.begin(), std::min(x.size(), n_), in_);
        fftw_execute(plan_);
        std::vector<std::complex<double>> H(n_);
        for (std::size_t k = 0; k <= n_ / 2; ++k)
            H[k] = {out_[k][0], out_[k][1]};
        for (std::size_t k = n_ / 2 + 1; k < n_; ++k)
            H[k] = std::conj(H[n_ - k]);
        return H;
    }

  private:
    std::size_t n_;
    double *in_ = nullptr;
    fftw_complex *out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

/// CIR amplitudes placed on the T_s grid (taps sharing a bin add coherently, phase dropped).
inline std::vector<double> gridded_cir(const Cir &cir)
{
    const std::size_t n = grid_length(cir.t_window, cir.t_s);
    std::vector<double> h(n, 0.0);
    for (const auto &t : cir.taps)
        h[grid_index(t.tau, cir.t_s, n)] += t.a;
    return h;
}

/// Zero-padding factor over the grid length used when no DFT size is given.
inline constexpr std::size_t default_cfr_padding = 4;

inline std::size_t default_dft_size(const Cir &cir)
{
    return std::bit_ceil(default_cfr_padding * grid_length(cir.t_window, cir.t_s));
}

struct Cfr
{
    std::vector<double> freqs;   // Hz, k / (N T_s), k = 0..N-1
    std::vector<double> mag_db;  // 20 log10 |H|
    double band_low_hz = constants::band_low_hz;
    double band_high_hz = constants::band_high_hz;
};

inline constexpr double cfr_floor_db = -300.0;

/// DFT of the gridded CIR. The sampled real CIR is taken as passband, so bin k sits at
/// k / (N T_s) Hz and the 3.1-5.3 GHz band lies below Nyquist.
inline Cfr cfr(const Cir &cir, std::size_t dft_size = 0)
{
    validate(cir);
    const auto h = gridded_cir(cir);
    if (dft_size == 0)
        dft_size = default_dft_size(cir);
    require(dft_size >= h.size(), "cfr: dft_size smaller than the CIR grid");

    RealDft dft(dft_size);
    const auto H = dft.forward(h);
    Cfr out;
    const double df = 1e9 / (static_cast<double>(dft_size) * cir.t_s);
    out.freqs.resize(dft_size);
    out.mag_db.resize(dft_size);
    for (std::size_t k = 0; k < dft_size; ++k)
    {
        out.freqs[k] = static_cast<double>(k) * df;
        const double mag = std::abs(H[k]);
        out.mag_db[k] = mag > 0.0 ? std::max(cfr_floor_db, 20.0 * std::log10(mag)) : cfr_floor_db;
    }
    return out;
}

struct SubbandConfig
{
    double band_start_hz = constants::band_low_hz;
    double band_width_hz = 150e6;
    /// 0 selects ceil((band_high - band_start) / band_width).
    std::size_t count = 0;
    double band_high_hz = constants::band_high_hz;
    std::size_t dft_size = 0;

    /// Frequency-dependent path loss (f / f_ref)^(-x) applied to |H(f)|^2. Zero for measured
    /// data, where the attenuation is already in the waveform; the path loss factor x for
    /// synthetic CIRs, whose taps are frequency-flat.
    double freq_exponent = 0.0;
    double reference_hz = constants::center_frequency_hz;
};

struct SubbandStat
{
    double center_hz = 0.0;
    double mean_db = 0.0;
    double var_db2 = 0.0;
};

/// Per sub-band: band-averaged |H(f)|^2 per realization in dB, then ensemble mean and
/// (unbiased) variance.
inline std::vector<SubbandStat> subband_power_stats(std::span<const Cir> ensemble, const SubbandConfig &cfg = {})
{
    require(!ensemble.empty(), "subband_power_stats: empty ensemble");
    require(cfg.band_width_hz > 0.0, "subband_power_stats: band_width must be > 0");
    const Cir &first = ensemble.front();
    for (const auto &c : ensemble)
        require(c.t_s == first.t_s && c.t_window == first.t_window, "subband_power_stats: mismatched grids");

    const std::size_t n_dft = cfg.dft_size ? cfg.dft_size : default_dft_size(first);
    const double df = 1e9 / (static_cast<double>(n_dft) * first.t_s);
    const double nyquist = 0.5e9 / first.t_s;
    const std::size_t count = cfg.count
                                  ? cfg.count
                                  : static_cast<std::size_t>(std::ceil(
                                        (cfg.band_high_hz - cfg.band_start_hz) / cfg.band_width_hz - 1e-9));
    require(count > 0, "subband_power_stats: no sub-bands requested");
    const double band_end = cfg.band_start_hz + static_cast<double>(count) * cfg.band_width_hz;
    require(cfg.band_start_hz >= 0.0 && band_end <= nyquist, "subband_power_stats: band outside the DFT grid");

    struct Range
    {
        std::size_t k0, k1;
        double center;
    };
    std::vector<Range> ranges;
    for (std::size_t b = 0; b < count; ++b)
    {
        const double lo = cfg.band_start_hz + static_cast<double>(b) * cfg.band_width_hz;
        const double hi = lo + cfg.band_width_hz;
        auto k0 = static_cast<std::size_t>(std::ceil(lo / df));
        auto k1 = static_cast<std::size_t>(std::ceil(hi / df));
        if (k1 <= k0)
            k1 = k0 + 1;
        ranges.push_back({k0, k1, 0.5 * (lo + hi)});
    }

    std::vector<double> weight(n_dft / 2 + 1, 1.0);
    if (cfg.freq_exponent != 0.0)
        for (std::size_t k = 1; k < weight.size(); ++k)
            weight[k] = std::pow(static_cast<double>(k) * df / cfg.reference_hz, -cfg.freq_exponent);

    RealDft dft(n_dft);
    std::vector<std::vector<double>> db(count);
    for (const auto &c : ensemble)
    {
        const auto H = dft.forward(gridded_cir(c));
        for (std::size_t b = 0; b < count; ++b)
        {
            double p = 0.0;
            for (std::size_t k = ranges[b].k0; k < ranges[b].k1; ++k)
                p += std::norm(H[k]) * weight[k];
            p /= static_cast<double>(ranges[b].k1 - ranges[b].k0);
            db[b].push_back(p > 0.0 ? 10.0 * std::log10(p) : cfr_floor_db);
        }
    }

    std::vector<SubbandStat> out;
    for (std::size_t b = 0; b < count; ++b)
    {
        const auto &v = db[b];
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v)
            var += (x - mean) * (x - mean);
        var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
        out.push_back({ranges[b].center, mean, var});
    }
    return out;
}

} // namespace uavuwb
