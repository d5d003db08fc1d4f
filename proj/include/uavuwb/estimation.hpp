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
#include "metrics.hpp"
#include "params.hpp"
#include "pathloss.hpp"

#include <map>
#include <optional>

namespace uavuwb
{

// ---- Cluster partitioning --------------------------------------------------

/// Default gap rule: five mean ray inter-arrivals.
inline double default_cluster_gap_ns(const SvParams &prior) { return 5.0 / prior.lambda; }

/// Starts a new cluster whenever consecutive taps are more than gap_ns apart.
inline Cir partition_clusters(const Cir &cir, double gap_ns)
{
    require(gap_ns > 0.0, "partition_clusters: gap_ns must be > 0");
    validate(cir);
    Cir out = cir;
    int label = 0;
    for (std::size_t i = 0; i < out.taps.size(); ++i)
    {
        if (i > 0 && out.taps[i].tau - out.taps[i - 1].tau > gap_ns)
            ++label;
        out.taps[i].cluster = label;
    }
    return out;
}

// ---- Rate estimators -------------------------------------------------------

/// Exponential MLE, 1 / mean gap.
inline std::optional<double> exponential_rate_mle(std::span<const double> gaps)
{
    if (gaps.empty())
        return std::nullopt;
    double s = 0.0;
    for (double g : gaps)
        s += g;
    return s > 0.0 ? std::optional<double>(static_cast<double>(gaps.size()) / s) : std::nullopt;
}

/// Exponential MLE when gap i is only observed if it is below bound[i] (right truncation,
/// e.g. a cluster arriving after the end of the observation window is never seen).
/// Reduces to 1 / mean gap as the bounds grow.
inline std::optional<double> truncated_exponential_rate_mle(std::span<const double> gaps,
                                                            std::span<const double> bounds)
{
    require(gaps.size() == bounds.size(), "truncated_exponential_rate_mle: size mismatch");
    if (gaps.empty())
        return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i)
    {
        require(gaps[i] >= 0.0 && gaps[i] <= bounds[i], "truncated_exponential_rate_mle: gap beyond its bound");
        sum += gaps[i];
    }
    if (!(sum > 0.0))
        return std::nullopt;

    // score(rate) = sum_i (E[g | g < u_i; rate] - g_i), decreasing in rate
    auto truncated_mean = [](double rate, double u) {
        const double x = rate * u;
        if (x < 1e-6)
            return 0.5 * u * (1.0 - x / 6.0);
        return 1.0 / rate - u / std::expm1(x);
    };
    auto score = [&](double rate) {
        double s = -sum;
        for (double u : bounds)
            s += truncated_mean(rate, u);
        return s;
    };
    double lo = 1e-9, hi = 1e9;
    if (score(lo) <= 0.0 || score(hi) >= 0.0)
        return std::nullopt;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = std::sqrt(lo * hi);
        (score(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

/// Arrival rate from sequences that were observed until an unknown stopping time (window edge
/// or power floor): sum(n_i - 1) / sum(L_i), with n_i arrivals after the anchor and L_i the last
/// arrival. Unbiased in ratio for a Poisson process observed on a fixed interval.
inline std::optional<double> censored_arrival_rate(const std::vector<std::vector<double>> &sequences)
{
    double num = 0.0, den = 0.0;
    for (const auto &s : sequences)
    {
        if (s.size() < 2)
            continue;
        num += static_cast<double>(s.size() - 2);
        den += s.back() - s.front();
    }
    if (!(den > 0.0) || !(num > 0.0))
        return std::nullopt;
    return num / den;
}

// ---- Regression helper -----------------------------------------------------

/// Pooled within-group OLS slope: each group gets its own intercept.
struct GroupedRegression
{
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    std::size_t points = 0;
    std::size_t groups = 0;

    void add_group(std::span<const double> x, std::span<const double> y)
    {
        if (x.size() < 2)
            return;
        const double n = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            mx += x[i], my += y[i];
        mx /= n;
        my /= n;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        points += x.size();
        ++groups;
    }

    std::optional<double> slope() const
    {
        if (!(sxx > 0.0))
            return std::nullopt;
        return sxy / sxx;
    }

    /// RMS of within-group residuals.
    double residual_rms() const
    {
        if (!(sxx > 0.0) || points <= groups)
            return 0.0;
        const double ss = std::max(0.0, syy - sxy * sxy / sxx);
        return std::sqrt(ss / static_cast<double>(points - groups));
    }
};

// ---- Fit report ------------------------------------------------------------

struct FitDiagnostics
{
    std::size_t realizations = 0;
    std::size_t cluster_gaps = 0;
    std::size_t ray_sequences = 0;
    std::size_t beta_points = 0;
    std::size_t mu_points = 0;
    double beta_residual_rms = 0.0;
    double mu_residual_rms = 0.0;
    double pathloss_residual_rms = 0.0;
    std::size_t nakagami_bins = 0;
    std::map<int, std::size_t> cluster_count_histogram;
    std::string label_source = "none";
    std::vector<std::string> notes;
};

struct FitReport
{
    std::optional<double> Lambda_hat, lambda_hat;  // 1/ns
    std::optional<double> mu_hat, beta_hat;        // ns
    std::optional<double> c_bar_hat;
    std::optional<double> eta_hat, xi_hat, m0_hat, v0_hat;
    std::optional<double> alpha_hat, pl0_hat, sigma_hat;
    FitDiagnostics diagnostics;

    /// True when every field a caller asked for was estimated.
    bool complete_sv() const { return Lambda_hat && lambda_hat && mu_hat && beta_hat && c_bar_hat; }
};

// ---- Saleh-Valenzuela fitting ----------------------------------------------

enum class ClusterLabels
{
    AsGiven,  // trust the cluster indices already on the taps (e.g. generator ground truth)
    GapRule,  // relabel with partition_clusters
};

struct SvFitOptions
{
    ClusterLabels labels = ClusterLabels::AsGiven;
    double gap_ns = 0.0;  // required for GapRule
    std::size_t min_realizations = 10;
    /// Regress beta only on rays that arrive before the next cluster starts.
    bool beta_non_overlapped_only = true;
};

namespace detail
{
struct ClusterView
{
    double Gamma = 0.0;
    std::vector<double> tau;  // absolute delays, ascending
    std::vector<double> power;
};

inline std::vector<ClusterView> group_by_cluster(const Cir &cir)
{
    std::map<int, ClusterView> by_label;
    for (const auto &t : cir.taps)
    {
        if (!(t.a > 0.0))
            continue;
        auto &c = by_label[t.cluster];
        c.tau.push_back(t.tau);
        c.power.push_back(t.a * t.a);
    }
    std::vector<ClusterView> out;
    for (auto &[label, c] : by_label)
    {
        c.Gamma = c.tau.front();
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const ClusterView &a, const ClusterView &b) { return a.Gamma < b.Gamma; });
    return out;
}
} // namespace detail

/// Lambda, lambda, mu, beta and mean cluster count from an ensemble of labelled CIRs.
///   Lambda: exponential MLE of cluster inter-arrivals, corrected for window truncation.
///   lambda: censoring-aware arrival rate of rays within each cluster.
///   beta:   -1 / pooled within-cluster slope of ln(power) on intra-cluster delay.
///   mu:     -1 / pooled within-CIR slope of ln(cluster first-ray power) on cluster delay.
inline FitReport fit_sv_params(std::span<const Cir> ensemble, const SvFitOptions &opt = {})
{
    FitReport rep;
    auto &diag = rep.diagnostics;
    diag.realizations = ensemble.size();
    diag.label_source = opt.labels == ClusterLabels::AsGiven ? "as-given" : "gap-rule";
    if (ensemble.size() < opt.min_realizations)
    {
        diag.notes.push_back("fewer than " + std::to_string(opt.min_realizations) + " realizations");
        return rep;
    }
    if (opt.labels == ClusterLabels::GapRule)
        require(opt.gap_ns > 0.0, "fit_sv_params: gap rule needs gap_ns > 0");

    std::vector<double> cluster_gaps, cluster_bounds;
    std::vector<std::vector<double>> ray_sequences;
    GroupedRegression beta_reg, mu_reg;
    double cluster_total = 0.0;

    for (const auto &raw : ensemble)
    {
        const Cir cir = opt.labels == ClusterLabels::GapRule ? partition_clusters(raw, opt.gap_ns) : raw;
        const auto clusters = detail::group_by_cluster(cir);
        if (clusters.empty())
            continue;
        cluster_total += static_cast<double>(clusters.size());
        ++diag.cluster_count_histogram[static_cast<int>(clusters.size())];

        std::vector<double> gx, gy;
        for (std::size_t n = 0; n < clusters.size(); ++n)
        {
            const auto &c = clusters[n];
            if (n > 0)
            {
                cluster_gaps.push_back(c.Gamma - clusters[n - 1].Gamma);
                cluster_bounds.push_back(cir.t_window - clusters[n - 1].Gamma);
            }

            std::vector<double> rel(c.tau.size());
            for (std::size_t m = 0; m < c.tau.size(); ++m)
                rel[m] = c.tau[m] - c.Gamma;
            ray_sequences.push_back(rel);

            const double limit = (opt.beta_non_overlapped_only && n + 1 < clusters.size())
                                     ? clusters[n + 1].Gamma - c.Gamma
                                     : std::numeric_limits<double>::infinity();
            std::vector<double> bx, by;
            for (std::size_t m = 0; m < rel.size(); ++m)
                if (rel[m] < limit)
                {
                    bx.push_back(rel[m]);
                    by.push_back(std::log(c.power[m]));
                }
            beta_reg.add_group(bx, by);

            gx.push_back(c.Gamma);
            gy.push_back(std::log(c.power.front()));
        }
        mu_reg.add_group(gx, gy);
    }

    const std::size_t used = diag.cluster_count_histogram.empty()
                                 ? 0
                                 : std::accumulate(diag.cluster_count_histogram.begin(),
                                                   diag.cluster_count_histogram.end(), std::size_t{0},
                                                   [](std::size_t s, const auto &kv) { return s + kv.second; });
    if (used > 0)
        rep.c_bar_hat = cluster_total / static_cast<double>(used);

    diag.cluster_gaps = cluster_gaps.size();
    diag.ray_sequences = ray_sequences.size();
    if (cluster_gaps.size() >= 1)
        rep.Lambda_hat = truncated_exponential_rate_mle(cluster_gaps, cluster_bounds);
    if (!rep.Lambda_hat)
        diag.notes.push_back("Lambda: fewer than 2 cluster arrivals in the ensemble");

    rep.lambda_hat = censored_arrival_rate(ray_sequences);
    if (!rep.lambda_hat)
        diag.notes.push_back("lambda: not enough intra-cluster arrivals");

    diag.beta_points = beta_reg.points;
    diag.beta_residual_rms = beta_reg.residual_rms();
    if (auto s = beta_reg.slope(); s && *s < 0.0)
        rep.beta_hat = -1.0 / *s;
    else
        diag.notes.push_back("beta: no decaying intra-cluster power trend");

    diag.mu_points = mu_reg.points;
    diag.mu_residual_rms = mu_reg.residual_rms();
    if (auto s = mu_reg.slope(); s && *s < 0.0)
        rep.mu_hat = -1.0 / *s;
    else
        diag.notes.push_back("mu: fewer than 2 clusters in every realization");
    return rep;
}

// ---- Nakagami fitting ------------------------------------------------------

struct NakagamiMoments
{
    double m = 0.0;      // +inf when Var[Y^2] is 0
    double omega = 0.0;  // E[Y^2]
};

/// m = E^2[Y^2] / Var[Y^2], Omega = E[Y^2], with population moments.
inline NakagamiMoments nakagami_moments(std::span<const double> y)
{
    require(!y.empty(), "nakagami_moments: no samples");
    const double n = static_cast<double>(y.size());
    double s = 0.0;
    for (double v : y)
        s += v * v;
    const double omega = s / n;
    double var = 0.0;
    for (double v : y)
        var += (v * v - omega) * (v * v - omega);
    var /= n;
    NakagamiMoments out;
    out.omega = omega;
    // variance at rounding level (m above 1e24) counts as zero
    out.m = var > 1e-24 * omega * omega ? omega * omega / var : std::numeric_limits<double>::infinity();
    return out;
}

struct NakagamiBin
{
    double t = 0.0;  // ns
    std::size_t samples = 0;
    double omega = 0.0;
    double m = 0.0;
    int cluster = 0;
};

struct NakagamiFit
{
    std::vector<NakagamiBin> bins;  // bins with enough realizations
    FitReport report;               // eta_hat, xi_hat, m0_hat, v0_hat
};

struct NakagamiFitOptions
{
    std::size_t min_realizations = 30;
    MFactorScale scale = MFactorScale::Decibel;
};

/// Per delay bin across realizations: Omega and m by moments; then eta, xi as the mean and
/// standard deviation of m over bins on the chosen scale. m0, v0 are the mean and variance of
/// m over the first-arriving bin of each cluster.
inline NakagamiFit fit_nakagami(std::span<const Cir> ensemble, const NakagamiFitOptions &opt = {})
{
    NakagamiFit out;
    auto &diag = out.report.diagnostics;
    diag.realizations = ensemble.size();
    if (ensemble.empty())
    {
        diag.notes.push_back("empty ensemble");
        return out;
    }
    const double t_s = ensemble.front().t_s;
    const double t_window = ensemble.front().t_window;
    const std::size_t n = grid_length(t_window, t_s);

    std::map<std::size_t, std::pair<std::vector<double>, int>> by_bin;
    for (const auto &c : ensemble)
    {
        require(c.t_s == t_s && c.t_window == t_window, "fit_nakagami: CIRs on mismatched grids");
        for (const auto &t : c.taps)
        {
            auto [it, inserted] = by_bin.try_emplace(grid_index(t.tau, t_s, n));
            if (inserted)
                it->second.second = t.cluster;
            it->second.first.push_back(t.a);
        }
    }

    std::vector<double> scaled;
    std::map<int, const NakagamiBin *> first_of_cluster;
    for (const auto &[idx, entry] : by_bin)
    {
        const auto &samples = entry.first;
        if (samples.size() < opt.min_realizations)
            continue;
        const auto mom = nakagami_moments(samples);
        out.bins.push_back({static_cast<double>(idx) * t_s, samples.size(), mom.omega, mom.m, entry.second});
    }
    for (const auto &b : out.bins)
    {
        if (!std::isfinite(b.m) || !(b.m > 0.0))
            continue;
        scaled.push_back(opt.scale == MFactorScale::Decibel ? 10.0 * std::log10(b.m) : std::log(b.m));
        if (!first_of_cluster.count(b.cluster))
            first_of_cluster[b.cluster] = &b;
    }
    diag.nakagami_bins = scaled.size();

    if (scaled.empty())
    {
        diag.notes.push_back("nakagami: no bin with enough realizations and nonzero variance");
        return out;
    }
    const double k = static_cast<double>(scaled.size());
    const double mean = std::accumulate(scaled.begin(), scaled.end(), 0.0) / k;
    double var = 0.0;
    for (double v : scaled)
        var += (v - mean) * (v - mean);
    out.report.eta_hat = mean;
    out.report.xi_hat = scaled.size() > 1 ? std::sqrt(var / (k - 1.0)) : 0.0;

    double m_sum = 0.0;
    for (const auto &[label, b] : first_of_cluster)
        m_sum += b->m;
    const double m0 = m_sum / static_cast<double>(first_of_cluster.size());
    double v0 = 0.0;
    for (const auto &[label, b] : first_of_cluster)
        v0 += (b->m - m0) * (b->m - m0);
    out.report.m0_hat = m0;
    out.report.v0_hat = v0 / static_cast<double>(first_of_cluster.size());
    return out;
}

/// Delay-dependent m-factor relation, eta = m0 - E[m] gamma and xi = v0 - Var[m] gamma.
/// Diagnostic only: the generator uses the scenario-constant (eta, xi). The symbol gamma here is
/// unrelated to the cluster-count noise.
struct MFactorDelayRelation
{
    double eta = 0.0;
    double xi = 0.0;
};

inline MFactorDelayRelation m_factor_delay_relation(double m0, double v0, double mean_m, double var_m, double gamma)
{
    return {m0 - mean_m * gamma, v0 - var_m * gamma};
}

/// Path loss fields of a report from a sample list.
inline void fill_path_loss(FitReport &rep, std::span<const PathLossSample> samples, double d0 = 1.0)
{
    const auto fit = fit_path_loss(samples, d0);
    rep.alpha_hat = fit.alpha_hat;
    rep.pl0_hat = fit.pl0_hat_db;
    rep.sigma_hat = fit.sigma_hat_db;
    rep.diagnostics.pathloss_residual_rms = fit.sigma_hat_db;
}

} // namespace uavuwb
