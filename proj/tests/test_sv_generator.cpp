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

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace uavuwb;
using Catch::Approx;
namespace ts = testing_support;

namespace
{
ClusterRealization cluster(double Gamma, double beta, std::vector<double> taus, double mu = 1e9)
{
    ClusterRealization c;
    c.Gamma = Gamma;
    c.beta_n = beta;
    c.mu_n = mu;
    for (double t : taus)
        c.rays.push_back({t, 1.0});
    return c;
}

double power_at(const Pdp &p, double t)
{
    for (const auto &b : p.bins)
        if (std::abs(b.t - t) < 1e-12)
            return b.p;
    FAIL("no bin at t=" << t);
    return 0.0;
}
} // namespace

TEST_CASE("sv_generator - Cluster count")
{
    SvParams sv;
    sv.Lambda = 0.1;
    sv.lambda = 1.0;
    sv.mu = 3.0;
    sv.beta = 1.0;
    sv.c_bar = 2.33;
    sv.sigma_N = 0.0;
    RandomSource rng(1, 0);

    // c_e / h = 2.33 without noise rounds to 2
    sv.c_e = 2.33 * 8.0;
    CHECK(draw_cluster_count(8.0, sv, rng) == 2);

    // very high UAV: floor of one cluster
    CHECK(draw_cluster_count(1e9, sv, rng) == 1);
    CHECK_THROWS_AS(draw_cluster_count(0.0, sv, rng), ValidationError);

    // calibrated presets reproduce the tabulated mean at the reference height
    for (const auto &row : tables::pdp)
    {
        const auto &p = preset_lookup(row.env, row.scenario, 0);
        RandomSource r(2, 0);
        double s = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
            s += draw_cluster_count(cluster_count_reference_height_m, p.sv, r);
        CHECK(s / n == Approx(row.c_bar).margin(0.05));
        CHECK(expected_cluster_count(p.sv.c_e / cluster_count_reference_height_m, p.sv.sigma_N) ==
              Approx(row.c_bar).margin(1e-6));
    }
}

TEST_CASE("sv_generator - Calibrated constants")
{
    for (const auto &p : all_presets())
    {
        CHECK(p.sv.c_d == 2.0);
        CHECK(p.sv.c_h == 2.0);
        CHECK(p.sv.c_e > 1.0);
        CHECK(p.sv.sigma_c == Approx(0.1 * p.sv.mu));
        CHECK(p.sv.sigma_N == Approx(0.1 * p.sv.c_bar));
        CHECK(p.sv.mu_scale > 0.0);
    }
}

TEST_CASE("sv_generator - Arrival times")
{
    RandomSource rng(3, 0);
    CHECK(draw_arrival_times(1, 0.5, rng) == std::vector<double>{0.0});
    CHECK(draw_arrival_times(0, 0.5, rng).empty());
    CHECK_THROWS_AS(draw_arrival_times(3, 0.0, rng), ValidationError);

    for (const auto &[rate, mean] : {std::pair{0.09, 1.0 / 0.09}, std::pair{4.34, 0.2304}})
    {
        const auto t = draw_arrival_times(100001, rate, rng);
        REQUIRE(t.front() == 0.0);
        for (std::size_t i = 1; i < t.size(); ++i)
            REQUIRE(t[i] > t[i - 1]);
        const double m = t.back() / 100000.0;
        CHECK(m == Approx(mean).epsilon(0.02));
        CHECK(1.0 / m == Approx(rate).epsilon(0.02));
    }

    const auto u = draw_arrivals_until(2.0, 5.0, rng);
    CHECK(u.front() == 0.0);
    CHECK(u.back() < 5.0);
}

TEST_CASE("sv_generator - Mean power profile")
{
    // one cluster, one ray: unit power
    const auto single = mean_power_profile({cluster(0.0, 1.0, {0.0})});
    REQUIRE(single.bins.size() == 1);
    CHECK(single.bins[0].p == 1.0);

    // two rays one beta apart: ratio e^-1
    const auto two = mean_power_profile({cluster(0.0, 1.0, {0.0, 1.0})});
    CHECK(two.bins[1].p / two.bins[0].p == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(two.total_power() == Approx(1.0).epsilon(1e-12));

    // inter-cluster decay exp(-Gamma / mu_n)
    const auto inter = mean_power_profile({cluster(0.0, 1.0, {0.0}, 2.0), cluster(4.0, 1.0, {0.0}, 2.0)});
    CHECK(power_at(inter, 4.0) / power_at(inter, 0.0) == Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(inter.cluster == std::vector<int>{0, 1});

    CHECK_THROWS_AS(mean_power_profile({}), DegenerateInputError);
}

TEST_CASE("sv_generator - Overlapping clusters")
{
    // gap 2 ns, beta 2 ns for both, cluster 0 ray at 3 ns spills into cluster 1: factor e^-1
    const std::vector<ClusterRealization> cl{cluster(0.0, 2.0, {0.0, 1.0, 3.0}), cluster(2.0, 2.0, {0.0, 0.5})};
    const auto plain = mean_power_profile(cl);
    const auto ov = overlap_power_profile(cl);
    const double r_plain = power_at(plain, 3.0) / power_at(plain, 0.0);
    const double r_ov = power_at(ov, 3.0) / power_at(ov, 0.0);
    CHECK(r_ov / r_plain == Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(power_at(ov, 1.0) / power_at(ov, 0.0) == Approx(power_at(plain, 1.0) / power_at(plain, 0.0)).epsilon(1e-14));
    CHECK(ov.total_power() == Approx(1.0).epsilon(1e-12));

    // no ray beyond the gap: identical output
    const std::vector<ClusterRealization> apart{cluster(0.0, 2.0, {0.0, 1.0}), cluster(5.0, 2.0, {0.0, 0.5})};
    const auto a = mean_power_profile(apart), b = overlap_power_profile(apart);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i)
    {
        CHECK(a.bins[i].t == b.bins[i].t);
        CHECK(a.bins[i].p == b.bins[i].p);
    }

    // chi -> 0+: factor -> 1
    ClusterRealization p0 = cluster(0.0, 1.0, {0.0}), p1 = cluster(1e-12, 3.0, {0.0});
    CHECK(cluster_overlap(p0, p1).X == 2.0);
    CHECK(cluster_overlap(p0, p1).factor() == Approx(1.0).epsilon(1e-11));
}

TEST_CASE("sv_generator - Inter-cluster decay regression")
{
    // Open scenario 3: pooled within-realization slope of log power on cluster delay
    const auto &p = preset_lookup(EnvironmentClass::Open, ScenarioId::S3_Ground7cm, 0);
    double sxy = 0, sxx = 0;
    std::size_t k = 0;
    for (double h : survey_heights_m)
        for (int i = 0; i < 2500; ++i, ++k)
        {
            RandomSource rng(4, k);
            const auto cl = draw_clusters(p.sv, h, rng);
            if (cl.size() < 2)
                continue;
            const auto prof = mean_power_profile(cl);
            std::vector<double> x, y;
            for (const auto &c : cl)
            {
                x.push_back(c.Gamma);
                y.push_back(std::log(power_at(prof, c.Gamma)));
            }
            double mx = 0, my = 0;
            for (std::size_t j = 0; j < x.size(); ++j)
            {
                mx += x[j] / double(x.size());
                my += y[j] / double(x.size());
            }
            for (std::size_t j = 0; j < x.size(); ++j)
            {
                sxy += (x[j] - mx) * (y[j] - my);
                sxx += (x[j] - mx) * (x[j] - mx);
            }
        }
    CHECK(sxy / sxx == Approx(-1.0 / 4.42).epsilon(0.10));
}

TEST_CASE("sv_generator - Nakagami amplitudes")
{
    Pdp one;
    one.bins.push_back({0.0, 1.0});

    // m = 1 (eta = 0 dB, xi = 0): Rayleigh, squared amplitude exponential
    NakagamiParams ray;
    ray.eta = 0.0;
    ray.xi = 0.0;
    RandomSource rng(5, 0);
    std::vector<double> y2;
    for (int i = 0; i < 100000; ++i)
    {
        const double a = draw_nakagami_amplitudes(one, ray, rng).taps.front().a;
        y2.push_back(a * a);
    }
    CHECK(ts::ks_statistic(y2, [](double x) { return 1.0 - std::exp(-x); }) < ts::ks_critical_001(y2.size()));

    // m = 200: concentrated at sqrt(Omega)
    std::vector<double> y;
    for (int i = 0; i < 20000; ++i)
        y.push_back(draw_nakagami(200.0, 1.0, rng));
    double m = 0, v = 0;
    for (double a : y)
        m += a / double(y.size());
    for (double a : y)
        v += (a - m) * (a - m) / double(y.size());
    CHECK(std::sqrt(v) / m < 0.05);
    CHECK(m == Approx(1.0).epsilon(0.01));

    // moment estimator at m = 2
    std::vector<double> z(100000);
    for (auto &a : z)
        a = draw_nakagami(2.0, 1.0, rng);
    const auto mom = nakagami_moments(z);
    CHECK(mom.m >= 1.9);
    CHECK(mom.m <= 2.1);

    // m clamp: a strongly negative eta always yields 0.5
    NakagamiParams low;
    low.eta = -40.0;
    low.xi = 0.5;
    for (int i = 0; i < 100; ++i)
        REQUIRE(draw_m_factor(low, rng) == 0.5);

    // natural-log scale: m = exp(eta) when xi = 0
    NakagamiParams nat;
    nat.eta = std::log(3.0);
    nat.xi = 0.0;
    nat.scale = MFactorScale::NaturalLog;
    CHECK(draw_m_factor(nat, rng) == Approx(3.0).epsilon(1e-14));

    // taps inherit delays and cluster labels
    Pdp prof;
    prof.bins = {{0.0, 0.5}, {1.0, 0.3}, {7.5, 0.2}};
    prof.cluster = {0, 0, 1};
    const auto cir = draw_nakagami_amplitudes(prof, ray, rng);
    REQUIRE(cir.taps.size() == 3);
    CHECK(cir.taps[2].tau == 7.5);
    CHECK(cir.taps[2].cluster == 1);
}

TEST_CASE("sv_generator - CIR generation")
{
    const auto &p = preset_lookup(EnvironmentClass::Open, ScenarioId::S2_Ground1m5, 0);
    const Geometry g = p.geometry(10.0, 8.0);

    // determinism
    const auto a = generate_ensemble(p, g, 25, 7), b = generate_ensemble(p, g, 25, 7);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        REQUIRE(a[i].taps.size() == b[i].taps.size());
        for (std::size_t j = 0; j < a[i].taps.size(); ++j)
        {
            REQUIRE(a[i].taps[j].tau == b[i].taps[j].tau);
            REQUIRE(a[i].taps[j].a == b[i].taps[j].a);
        }
    }

    // window truncation and shared invariants
    for (const auto &c : a)
    {
        CHECK_NOTHROW(validate(c));
        CHECK(c.taps.back().tau < 100.0);
        CHECK(c.t_s == 0.06);
    }

    // averaged-PDP RMS delay spread of a 25-CIR ensemble is in the low-nanosecond range
    const double trms = delay_stats(average_pdp(a)).t_rms;
    CHECK(trms > 0.1);
    CHECK(trms < 10.0);

    // a shorter window truncates
    GeneratorOptions shortw;
    shortw.t_window = 5.0;
    RandomSource rng(8, 0);
    const auto c = generate_cir(p, g, rng, shortw);
    CHECK(c.taps.back().tau < 5.0);
}

TEST_CASE("sv_generator - Energy accounting")
{
    const auto &p = preset_lookup(EnvironmentClass::SubUrban, ScenarioId::S2_Ground1m5, 0);
    const Geometry g = p.geometry(10.0, 8.0);

    // profile energy before scaling
    RandomSource rng(9, 0);
    for (int i = 0; i < 100; ++i)
    {
        const auto prof = overlap_power_profile(draw_clusters(p.sv, 8.0, rng));
        REQUIRE(prof.total_power() == Approx(1.0).epsilon(1e-9));
    }

    // without shadowing the ensemble-mean energy equals the path gain
    GeneratorOptions opt;
    opt.apply_shadowing = false;
    const auto ens = generate_ensemble(p, g, 10000, 10, opt);
    double e = 0;
    for (const auto &c : ens)
        e += c.energy() / double(ens.size());
    CHECK(e == Approx(db_to_linear(-path_loss_static(g, p.pl))).epsilon(0.03));
}

TEST_CASE("sv_generator - Scenario ordering of ray density")
{
    const auto &s1 = preset_lookup(EnvironmentClass::Open, ScenarioId::S1_Foliage, 0);
    const auto &s2 = preset_lookup(EnvironmentClass::Open, ScenarioId::S2_Ground1m5, 0);
    const auto &s3 = preset_lookup(EnvironmentClass::Open, ScenarioId::S3_Ground7cm, 0);
    CHECK(s1.sv.lambda > s2.sv.lambda);
    CHECK(s2.sv.lambda > s3.sv.lambda);

    auto mean_taps = [](const ScenarioPreset &p) {
        const auto ens = generate_ensemble(p, p.geometry(10.0, 8.0), 1000, 12);
        double n = 0;
        for (const auto &c : ens)
            n += double(c.taps.size()) / double(ens.size());
        return n;
    };
    const double n1 = mean_taps(s1), n2 = mean_taps(s2), n3 = mean_taps(s3);
    CHECK(n1 > n2);
    CHECK(n2 > n3);
}
