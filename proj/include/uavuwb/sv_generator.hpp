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

#include "params.hpp"
#include "pathloss.hpp"

#include <array>
#include <numeric>

namespace uavuwb
{

// ---- Realizations ----------------------------------------------------------

struct Ray
{
    double tau = 0.0;         // ns, relative to the cluster delay
    double mean_power = 1.0;  // E(a^2), linear
};

struct ClusterRealization
{
    double Gamma = 0.0;   // ns
    double mu_n = 1.0;    // realized inter-cluster decay, ns
    double beta_n = 1.0;  // intra-cluster decay, ns
    std::vector<Ray> rays;
};

/// Overlap between cluster n-1 and cluster n.
struct ClusterOverlap
{
    double chi = 0.0;  // Gamma_n - Gamma_{n-1}, ns
    double X = 0.0;    // mean of the two decay constants, ns

    double factor() const { return std::exp(-chi / X); }
};

inline ClusterOverlap cluster_overlap(const ClusterRealization &prev, const ClusterRealization &next)
{
    return {next.Gamma - prev.Gamma, 0.5 * (prev.beta_n + next.beta_n)};
}

// ---- Elementary draws ------------------------------------------------------

/// C_n = max(1, round(c_e / h + gamma)), gamma ~ N(0, sigma_N^2).
inline int draw_cluster_count(double h_uav, const SvParams &sv, RandomSource &rng)
{
    require(h_uav > 0.0, "draw_cluster_count: h_uav must be > 0");
    const double gamma = sv.sigma_N > 0.0 ? rng.normal(0.0, sv.sigma_N) : 0.0;
    const double c = std::round(sv.c_e / h_uav + gamma);
    return static_cast<int>(std::max(1.0, std::min(c, 1e6)));
}

/// `count` Poisson arrivals with the first anchored at 0.
inline std::vector<double> draw_arrival_times(int count, double rate, RandomSource &rng)
{
    require(rate > 0.0, "draw_arrival_times: rate must be > 0");
    std::vector<double> t;
    if (count <= 0)
        return t;
    t.reserve(static_cast<std::size_t>(count));
    t.push_back(0.0);
    for (int i = 1; i < count; ++i)
    {
        double next;
        do
            next = t.back() + rng.exponential(rate);
        while (next <= t.back());
        t.push_back(next);
    }
    return t;
}

/// Poisson arrivals anchored at 0 and kept while strictly below `horizon`.
inline std::vector<double> draw_arrivals_until(double rate, double horizon, RandomSource &rng)
{
    require(rate > 0.0, "draw_arrivals_until: rate must be > 0");
    std::vector<double> t{0.0};
    for (;;)
    {
        const double next = t.back() + rng.exponential(rate);
        if (!(next < horizon))
            break;
        if (next > t.back())
            t.push_back(next);
    }
    return t;
}

/// mu_n = mu_scale (c_d Gamma + h / c_h) + psi, floored at mu_min.
inline double draw_inter_cluster_decay(double Gamma, double h_uav, const SvParams &sv, RandomSource &rng)
{
    const double psi = sv.sigma_c > 0.0 ? rng.normal(0.0, sv.sigma_c) : 0.0;
    return std::max(sv.mu_min, sv.mu_scale * (sv.c_d * Gamma + h_uav / sv.c_h) + psi);
}

/// Rays are drawn until the window edge or until the intra-cluster mean power falls
/// ray_floor_db below the cluster peak.
inline double ray_horizon_ns(const SvParams &sv) { return sv.beta * sv.ray_floor_db * std::numbers::ln10 / 10.0; }

/// Cluster delays only (no rays), truncated to the window. Shared by the generator and the
/// calibration of mu_scale so both see the same cluster-delay distribution.
inline std::vector<double> draw_cluster_delays(double h_uav, const SvParams &sv, RandomSource &rng, double t_window)
{
    auto g = draw_arrival_times(draw_cluster_count(h_uav, sv, rng), sv.Lambda, rng);
    std::erase_if(g, [&](double x) { return !(x < t_window); });
    return g;
}

inline std::vector<ClusterRealization> draw_clusters(const SvParams &sv, double h_uav, RandomSource &rng,
                                                     double t_window = constants::observation_window_ns)
{
    sv.validate();
    std::vector<ClusterRealization> clusters;
    for (double G : draw_cluster_delays(h_uav, sv, rng, t_window))
    {
        ClusterRealization c;
        c.Gamma = G;
        c.beta_n = sv.beta;
        c.mu_n = draw_inter_cluster_decay(G, h_uav, sv, rng);
        const double horizon = std::min(t_window - G, ray_horizon_ns(sv));
        for (double tau : draw_arrivals_until(sv.lambda, horizon, rng))
            c.rays.push_back({tau, 1.0});
        clusters.push_back(std::move(c));
    }
    return clusters;
}

// ---- Power profiles --------------------------------------------------------

namespace detail
{
inline void validate_clusters(const std::vector<ClusterRealization> &clusters)
{
    if (clusters.empty())
        throw DegenerateInputError("power profile: empty cluster list");
    for (std::size_t i = 0; i < clusters.size(); ++i)
    {
        const auto &c = clusters[i];
        require(c.Gamma >= 0.0 && c.mu_n > 0.0 && c.beta_n > 0.0, "power profile: invalid cluster");
        require(!c.rays.empty() && c.rays.front().tau == 0.0, "power profile: cluster rays must start at 0");
        for (std::size_t m = 0; m < c.rays.size(); ++m)
        {
            require(c.rays[m].mean_power > 0.0, "power profile: ray mean power must be > 0");
            if (m > 0)
                require(c.rays[m - 1].tau < c.rays[m].tau, "power profile: ray delays not ascending");
        }
        if (i > 0)
            require(clusters[i - 1].Gamma <= c.Gamma, "power profile: clusters not sorted by delay");
    }
}

/// Merges per-cluster tap powers into a delay-sorted profile normalized to unit energy.
inline Pdp assemble_profile(const std::vector<ClusterRealization> &clusters,
                            const std::vector<std::vector<double>> &powers)
{
    struct Entry
    {
        double t;
        double p;
        int cluster;
    };
    std::vector<Entry> entries;
    for (std::size_t n = 0; n < clusters.size(); ++n)
        for (std::size_t m = 0; m < clusters[n].rays.size(); ++m)
            entries.push_back({clusters[n].Gamma + clusters[n].rays[m].tau, powers[n][m], static_cast<int>(n)});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) { return a.t < b.t; });

    double total = 0.0;
    for (const auto &e : entries)
        total += e.p;
    if (!(total > 0.0))
        throw DegenerateInputError("power profile: zero total power");

    Pdp pdp;
    pdp.normalization = total;
    pdp.bins.reserve(entries.size());
    pdp.cluster.reserve(entries.size());
    for (const auto &e : entries)
    {
        pdp.bins.push_back({e.t, e.p / total});
        pdp.cluster.push_back(e.cluster);
    }
    return pdp;
}
} // namespace detail

/// Non-overlapping form: E(a^2) exp(-tau / beta_n) exp(-Gamma_n / mu_n), normalized to unit energy.
inline Pdp mean_power_profile(const std::vector<ClusterRealization> &clusters)
{
    detail::validate_clusters(clusters);
    std::vector<std::vector<double>> powers(clusters.size());
    for (std::size_t n = 0; n < clusters.size(); ++n)
    {
        const auto &c = clusters[n];
        const double inter = std::exp(-c.Gamma / c.mu_n);
        for (const auto &ray : c.rays)
            powers[n].push_back(ray.mean_power * std::exp(-ray.tau / c.beta_n) * inter);
    }
    return detail::assemble_profile(clusters, powers);
}

/// Overlapping-cluster form: rays of cluster n-1 that extend past Gamma_n - Gamma_{n-1} are
/// additionally scaled by exp(-chi / X). Identical to mean_power_profile when no ray does.
inline Pdp overlap_power_profile(const std::vector<ClusterRealization> &clusters)
{
    detail::validate_clusters(clusters);
    std::vector<std::vector<double>> powers(clusters.size());
    for (std::size_t n = 0; n < clusters.size(); ++n)
    {
        const auto &c = clusters[n];
        const double inter = std::exp(-c.Gamma / c.mu_n);
        std::optional<ClusterOverlap> ov;
        if (n + 1 < clusters.size())
            ov = cluster_overlap(c, clusters[n + 1]);
        for (const auto &ray : c.rays)
        {
            double p = ray.mean_power * std::exp(-ray.tau / c.beta_n);
            if (ov && ray.tau > ov->chi)
                p *= ov->factor();
            powers[n].push_back(p * inter);
        }
    }
    return detail::assemble_profile(clusters, powers);
}

// ---- Small-scale fading ----------------------------------------------------

/// m ~ lognormal per the configured scale, clamped to m >= m_min.
inline double draw_m_factor(const NakagamiParams &nak, RandomSource &rng)
{
    const double z = nak.ln_location() + (nak.ln_scale() > 0.0 ? nak.ln_scale() * rng.normal() : 0.0);
    return std::max(nak.m_min, std::exp(z));
}

/// Y ~ Nakagami(m, Omega), drawn as sqrt of Gamma(m, Omega / m).
inline double draw_nakagami(double m, double omega, RandomSource &rng)
{
    if (omega <= 0.0)
        return 0.0;
    return std::sqrt(rng.gamma(m, omega / m));
}

/// Amplitudes with one given m per profile bin. Bins that share a delay are merged by power.
inline Cir draw_nakagami_amplitudes(const Pdp &pdp, std::span<const double> m_per_bin, RandomSource &rng,
                                    double t_s = constants::sample_period_ns,
                                    double t_window = constants::observation_window_ns)
{
    validate(pdp);
    require(m_per_bin.size() == pdp.bins.size(), "draw_nakagami_amplitudes: one m per bin required");
    Cir cir;
    cir.t_s = t_s;
    cir.t_window = t_window;
    cir.taps.reserve(pdp.bins.size());
    for (std::size_t i = 0; i < pdp.bins.size(); ++i)
    {
        const auto &b = pdp.bins[i];
        if (!(b.t < t_window))
            continue;
        const double a = draw_nakagami(m_per_bin[i], b.p, rng);
        const int cl = pdp.cluster.empty() ? 0 : pdp.cluster[i];
        if (!cir.taps.empty() && cir.taps.back().tau == b.t)
            cir.taps.back().a = std::hypot(cir.taps.back().a, a);
        else
            cir.taps.push_back({b.t, a, cl});
    }
    validate(cir);
    return cir;
}

/// Amplitudes with m drawn independently per bin from the lognormal m-factor model.
inline Cir draw_nakagami_amplitudes(const Pdp &pdp, const NakagamiParams &nak, RandomSource &rng,
                                    double t_s = constants::sample_period_ns,
                                    double t_window = constants::observation_window_ns)
{
    nak.validate();
    std::vector<double> m(pdp.bins.size());
    for (auto &v : m)
        v = draw_m_factor(nak, rng);
    return draw_nakagami_amplitudes(pdp, m, rng, t_s, t_window);
}

// ---- Full CIR --------------------------------------------------------------

struct GeneratorOptions
{
    double t_s = constants::sample_period_ns;
    double t_window = constants::observation_window_ns;
    bool apply_shadowing = true;
};

/// Clusters -> overlap-aware mean profile -> Nakagami amplitudes -> path loss scaling.
/// One shadowing draw per CIR.
inline Cir generate_cir(const ScenarioPreset &preset, const Geometry &geom, RandomSource &rng,
                        const GeneratorOptions &opt = {})
{
    geom.validate();
    const auto clusters = draw_clusters(preset.sv, geom.h_uav, rng, opt.t_window);
    const Pdp profile = overlap_power_profile(clusters);
    Cir cir = draw_nakagami_amplitudes(profile, preset.nak, rng, opt.t_s, opt.t_window);

    const double s = opt.apply_shadowing ? draw_shadowing(preset.pl, rng) : 0.0;
    const double gain = std::sqrt(db_to_linear(-path_loss_static(geom, preset.pl, s)));
    for (auto &t : cir.taps)
        t.a *= gain;
    return cir;
}

/// CIR i uses stream i of `seed`.
inline std::vector<Cir> generate_ensemble(const ScenarioPreset &preset, const Geometry &geom, std::size_t count,
                                          std::uint64_t seed, const GeneratorOptions &opt = {})
{
    std::vector<Cir> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        RandomSource rng(seed, i);
        out.push_back(generate_cir(preset, geom, rng, opt));
    }
    return out;
}

// ---- Calibration of the untabulated constants ------------------------------

/// UAV heights at which the tabulated parameters were measured (m).
inline constexpr std::array<double, 4> survey_heights_m{4.0, 8.0, 12.0, 16.0};

/// Height at which c_e is calibrated against the tabulated mean cluster count.
inline constexpr double cluster_count_reference_height_m = 8.0;

/// E[max(1, round(x + gamma))] for gamma ~ N(0, s^2).
inline double expected_cluster_count(double x, double s)
{
    if (s <= 0.0)
        return std::max(1.0, std::round(x));
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    double mean = Phi((1.5 - x) / s);
    const int k_hi = static_cast<int>(std::ceil(x + 12.0 * s)) + 2;
    for (int k = 2; k <= k_hi; ++k)
        mean += k * (Phi((k + 0.5 - x) / s) - Phi((k - 0.5 - x) / s));
    return mean;
}

/// Offset x = c_e / h such that the expected clamped cluster count equals c_bar. For
/// c_bar <= 1 the target is only reachable in the limit; x = 1 keeps the count at 1 with
/// negligible probability of a second cluster.
inline double calibrate_cluster_offset(double c_bar, double sigma_N)
{
    if (c_bar <= 1.0)
        return 1.0;
    double lo = 0.0, hi = c_bar + 20.0 * sigma_N + 2.0;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (expected_cluster_count(mid, sigma_N) < c_bar ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail
{
struct ClusterSkeleton
{
    std::vector<double> Gamma;
    std::vector<double> psi;
    double h = 0.0;
};

/// Pooled within-realization OLS slope of -Gamma_n / mu_n on Gamma_n.
inline double skeleton_slope(const std::vector<ClusterSkeleton> &skeletons, const SvParams &sv, double mu_scale)
{
    double num = 0.0, den = 0.0;
    for (const auto &s : skeletons)
    {
        const std::size_t k = s.Gamma.size();
        if (k < 2)
            continue;
        std::vector<double> y(k);
        double gm = 0.0, ym = 0.0;
        for (std::size_t i = 0; i < k; ++i)
        {
            const double mu = std::max(sv.mu_min, mu_scale * (sv.c_d * s.Gamma[i] + s.h / sv.c_h) + s.psi[i]);
            y[i] = -s.Gamma[i] / mu;
            gm += s.Gamma[i];
            ym += y[i];
        }
        gm /= static_cast<double>(k);
        ym /= static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i)
        {
            num += (s.Gamma[i] - gm) * (y[i] - ym);
            den += (s.Gamma[i] - gm) * (s.Gamma[i] - gm);
        }
    }
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}
} // namespace detail

/// Chooses mu_scale so that the log-linear regression of cluster peak power on cluster delay,
/// over an ensemble spanning the survey heights, has slope -1 / mu. Deterministic.
inline double calibrate_mu_scale(const SvParams &sv, double t_window = constants::observation_window_ns,
                                 std::size_t per_height = 2000, std::uint64_t seed = 0x5eed'ca1bULL)
{
    std::vector<detail::ClusterSkeleton> skeletons;
    std::uint64_t stream = 0;
    for (double h : survey_heights_m)
        for (std::size_t i = 0; i < per_height; ++i)
        {
            RandomSource rng(seed, stream++);
            detail::ClusterSkeleton s;
            s.h = h;
            s.Gamma = draw_cluster_delays(h, sv, rng, t_window);
            for (std::size_t k = 0; k < s.Gamma.size(); ++k)
                s.psi.push_back(sv.sigma_c > 0.0 ? rng.normal(0.0, sv.sigma_c) : 0.0);
            skeletons.push_back(std::move(s));
        }

    const double target = -1.0 / sv.mu;
    if (std::isnan(detail::skeleton_slope(skeletons, sv, 1.0)))
    {
        // no multi-cluster realizations: match the first delayed cluster at the reference height
        return sv.mu / (sv.c_d / sv.Lambda + cluster_count_reference_height_m / sv.c_h);
    }
    // slope increases towards 0 as mu_scale grows
    double lo = std::log(1e-6), hi = std::log(1e4);
    for (int i = 0; i < 100; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (detail::skeleton_slope(skeletons, sv, std::exp(mid)) < target ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

/// Fills the untabulated constants from the tabulated (Lambda, lambda, mu, beta, c_bar):
/// c_d = c_h = 2, sigma_c = 0.1 mu, sigma_N = 0.1 c_bar, then c_e and mu_scale calibrated.
inline SvParams calibrate_sv_params(SvParams sv, double t_window = constants::observation_window_ns)
{
    sv.sigma_c = 0.1 * sv.mu;
    sv.sigma_N = 0.1 * sv.c_bar;
    sv.c_e = cluster_count_reference_height_m * calibrate_cluster_offset(sv.c_bar, sv.sigma_N);
    sv.mu_scale = calibrate_mu_scale(sv, t_window);
    sv.validate();
    return sv;
}

} // namespace uavuwb
