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

// Plain-text CSV formats. Every file starts with a block of "# key=value" lines carrying at
// least format_version, followed by one column-header line and the data rows. Numbers are
// written with 9 significant digits.

#include "estimation.hpp"
#include "metrics.hpp"
#include "presets.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace uavuwb::io
{

inline constexpr int format_version = 1;

struct ParseError : Error
{
    ParseError(const std::string &source, std::size_t line, std::size_t column, const std::string &what)
        : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what), line(line),
          column(column)
    {
    }
    std::size_t line;
    std::size_t column;
};

struct IoError : Error
{
    using Error::Error;
};

/// Ordered key/value header block.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string meta_get(const Metadata &meta, std::string_view key, std::string fallback = {})
{
    for (const auto &[k, v] : meta)
        if (k == key)
            return v;
    return fallback;
}

inline void meta_set(Metadata &meta, const std::string &key, std::string value)
{
    for (auto &[k, v] : meta)
        if (k == key)
        {
            v = std::move(value);
            return;
        }
    meta.emplace_back(key, std::move(value));
}

inline std::string fmt(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Radio metadata carried in headers for documentation only.
inline Metadata radio_metadata()
{
    return {{"band_hz", fmt(constants::band_low_hz) + "-" + fmt(constants::band_high_hz)},
            {"center_hz", fmt(constants::center_frequency_hz)},
            {"pulse_repetition_hz", fmt(constants::pulse_repetition_hz)},
            {"max_tx_power_dbm", fmt(constants::max_tx_power_dbm)}};
}

// ---- Generic table reader/writer -------------------------------------------

struct Table
{
    Metadata meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source line of each row
    std::string source;

    std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name)
                return i;
        throw ParseError(source, 1, 1, "missing column '" + std::string(name) + "'");
    }

    double number(std::size_t row, std::size_t col) const
    {
        const std::string &s = rows[row][col];
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (s.empty() || used != s.size())
            throw ParseError(source, row_lines[row], col + 1, "expected a number, got '" + s + "'");
        return v;
    }

    long long integer(std::size_t row, std::size_t col) const
    {
        const double v = number(row, col);
        if (v != std::floor(v))
            throw ParseError(source, row_lines[row], col + 1, "expected an integer, got '" + rows[row][col] + "'");
        return static_cast<long long>(v);
    }
};

inline std::vector<std::string> split_csv_line(const std::string &line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line)
    {
        if (c == ',')
        {
            out.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
            cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

inline Table read_table(std::istream &is, const std::string &source, const std::vector<std::string> &expected_columns)
{
    Table t;
    t.source = source;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            if (have_header)
                throw ParseError(source, lineno, 1, "metadata line after the column header");
            auto body = line.substr(1);
            body.erase(0, body.find_first_not_of(' '));
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                continue;  // free-form comment
            t.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!have_header)
        {
            t.columns = split_csv_line(line);
            if (!expected_columns.empty() && t.columns != expected_columns)
            {
                std::string want;
                for (const auto &c : expected_columns)
                    want += (want.empty() ? "" : ",") + c;
                throw ParseError(source, lineno, 1, "unexpected column header (expected '" + want + "')");
            }
            have_header = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != t.columns.size())
            throw ParseError(source, lineno, std::min(cells.size(), t.columns.size()) + 1,
                             "expected " + std::to_string(t.columns.size()) + " fields, got " +
                                 std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.row_lines.push_back(lineno);
    }
    if (!have_header)
        throw ParseError(source, lineno + 1, 1, "missing column header");
    const auto version = meta_get(t.meta, "format_version");
    if (version.empty())
        throw ParseError(source, 1, 1, "missing format_version header");
    if (version != std::to_string(format_version))
        throw ParseError(source, 1, 1, "unsupported format_version " + version);
    return t;
}

inline Table read_table_file(const std::filesystem::path &path, const std::vector<std::string> &expected_columns)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open " + path.string());
    return read_table(is, path.string(), expected_columns);
}

inline void write_header(std::ostream &os, Metadata meta, const std::string &columns)
{
    meta_set(meta, "format_version", std::to_string(format_version));
    // version first
    std::stable_partition(meta.begin(), meta.end(), [](const auto &kv) { return kv.first == "format_version"; });
    for (const auto &[k, v] : meta)
        os << "# " << k << "=" << v << "\n";
    os << columns << "\n";
}

/// Writes through a temporary file so a failed write never leaves a partial output behind.
template <typename Fn>
void write_file(const std::filesystem::path &path, Fn &&body)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os)
            throw IoError("cannot write " + path.string());
        body(os);
        os.flush();
        if (!os)
            throw IoError("write failed for " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

// ---- CIR -------------------------------------------------------------------

inline const std::string cir_columns = "tau_ns,amplitude,cluster";

inline void write_cir(std::ostream &os, const Cir &cir, Metadata meta = {})
{
    meta_set(meta, "kind", "cir");
    meta_set(meta, "t_s_ns", fmt(cir.t_s));
    meta_set(meta, "t_window_ns", fmt(cir.t_window));
    meta_set(meta, "units", "tau_ns=ns amplitude=linear");
    write_header(os, meta, cir_columns);
    for (const auto &t : cir.taps)
        os << fmt(t.tau) << "," << fmt(t.a) << "," << t.cluster << "\n";
}

struct CirFile
{
    Cir cir;
    Metadata meta;
};

inline CirFile read_cir(std::istream &is, const std::string &source = "<cir>")
{
    const Table t = read_table(is, source, split_csv_line(cir_columns));
    CirFile out;
    out.meta = t.meta;
    auto meta_number = [&](const char *key, double fallback) {
        const auto s = meta_get(t.meta, key);
        if (s.empty())
            return fallback;
        try
        {
            return std::stod(s);
        }
        catch (const std::exception &)
        {
            throw ParseError(source, 1, 1, std::string("bad metadata value for ") + key);
        }
    };
    out.cir.t_s = meta_number("t_s_ns", constants::sample_period_ns);
    out.cir.t_window = meta_number("t_window_ns", constants::observation_window_ns);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        out.cir.taps.push_back({t.number(r, 0), t.number(r, 1), static_cast<int>(t.integer(r, 2))});
    try
    {
        validate(out.cir);
    }
    catch (const ValidationError &e)
    {
        throw ParseError(source, t.row_lines.empty() ? 1 : t.row_lines.front(), 1, e.what());
    }
    return out;
}

inline CirFile read_cir_file(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open " + path.string());
    return read_cir(is, path.string());
}

// ---- Ensemble manifest -----------------------------------------------------

inline const std::string manifest_columns = "file,seed,stream,env,scenario,v_mph,h_m,d_m";
inline constexpr const char *manifest_name = "manifest.csv";

struct ManifestEntry
{
    std::string file;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    EnvironmentClass env = EnvironmentClass::Open;
    ScenarioId scenario = ScenarioId::S2_Ground1m5;
    int v_mph = 0;
    double h_m = 0.0;
    double d_m = 0.0;
};

struct Manifest
{
    Metadata meta;
    std::vector<ManifestEntry> entries;
};

inline void write_manifest(std::ostream &os, const Manifest &m)
{
    Metadata meta = m.meta;
    meta_set(meta, "kind", "manifest");
    write_header(os, meta, manifest_columns);
    for (const auto &e : m.entries)
        os << e.file << "," << e.seed << "," << e.stream << "," << to_string(e.env) << "," << to_string(e.scenario)
           << "," << e.v_mph << "," << fmt(e.h_m) << "," << fmt(e.d_m) << "\n";
}

inline Manifest read_manifest(std::istream &is, const std::string &source = "<manifest>")
{
    const Table t = read_table(is, source, split_csv_line(manifest_columns));
    Manifest m;
    m.meta = t.meta;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        ManifestEntry e;
        e.file = t.rows[r][0];
        try
        {
            e.seed = std::stoull(t.rows[r][1]);
            e.stream = std::stoull(t.rows[r][2]);
        }
        catch (const std::exception &)
        {
            throw ParseError(source, t.row_lines[r], 2, "bad seed/stream");
        }
        try
        {
            e.env = parse_environment(t.rows[r][3]);
        }
        catch (const ValidationError &ex)
        {
            throw ParseError(source, t.row_lines[r], 4, ex.what());
        }
        try
        {
            e.scenario = parse_scenario(t.rows[r][4]);
        }
        catch (const ValidationError &ex)
        {
            throw ParseError(source, t.row_lines[r], 5, ex.what());
        }
        e.v_mph = static_cast<int>(t.integer(r, 5));
        e.h_m = t.number(r, 6);
        e.d_m = t.number(r, 7);
        m.entries.push_back(std::move(e));
    }
    return m;
}

// ---- Scan sets -------------------------------------------------------------

/// Long format; scan = -1 marks template samples.
inline const std::string scanset_columns = "scan,sample,value";

inline void write_scanset(std::ostream &os, const ScanSet &set, Metadata meta = {})
{
    set.validate();
    meta_set(meta, "kind", "scanset");
    meta_set(meta, "t_s_ns", fmt(set.t_s));
    meta_set(meta, "n_tot", std::to_string(set.scans.size()));
    meta_set(meta, "env", std::string(to_string(set.env)));
    meta_set(meta, "scenario", std::string(to_string(set.scenario)));
    meta_set(meta, "d_m", fmt(set.geometry.d));
    meta_set(meta, "d0_m", fmt(set.geometry.d0));
    meta_set(meta, "h_uav_m", fmt(set.geometry.h_uav));
    meta_set(meta, "h_gnd_m", fmt(set.geometry.h_gnd));
    meta_set(meta, "h_opt_m", fmt(set.geometry.h_opt));
    meta_set(meta, "v_mps", fmt(set.geometry.v));
    write_header(os, meta, scanset_columns);
    for (std::size_t k = 0; k < set.template_pulse.size(); ++k)
        os << -1 << "," << k << "," << fmt(set.template_pulse[k]) << "\n";
    for (std::size_t s = 0; s < set.scans.size(); ++s)
        for (std::size_t k = 0; k < set.scans[s].size(); ++k)
            os << s << "," << k << "," << fmt(set.scans[s][k]) << "\n";
}

inline ScanSet read_scanset(std::istream &is, const std::string &source = "<scanset>")
{
    const Table t = read_table(is, source, split_csv_line(scanset_columns));
    ScanSet set;
    auto num = [&](const char *key, double fallback) {
        const auto s = meta_get(t.meta, key);
        return s.empty() ? fallback : std::stod(s);
    };
    try
    {
        set.t_s = num("t_s_ns", constants::sample_period_ns);
        set.geometry.d = num("d_m", 1.0);
        set.geometry.d0 = num("d0_m", 1.0);
        set.geometry.h_uav = num("h_uav_m", 8.0);
        set.geometry.h_gnd = num("h_gnd_m", 1.5);
        set.geometry.h_opt = num("h_opt_m", 1.5);
        set.geometry.v = num("v_mps", 0.0);
        set.env = parse_environment(meta_get(t.meta, "env", "open"));
        set.scenario = parse_scenario(meta_get(t.meta, "scenario", "s2"));
    }
    catch (const std::exception &e)
    {
        throw ParseError(source, 1, 1, std::string("bad scanset metadata: ") + e.what());
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const long long scan = t.integer(r, 0);
        const long long sample = t.integer(r, 1);
        const double v = t.number(r, 2);
        if (scan < -1 || sample < 0)
            throw ParseError(source, t.row_lines[r], 1, "negative index");
        auto &dst = scan < 0 ? set.template_pulse : [&]() -> std::vector<double> & {
            if (set.scans.size() <= static_cast<std::size_t>(scan))
                set.scans.resize(static_cast<std::size_t>(scan) + 1);
            return set.scans[static_cast<std::size_t>(scan)];
        }();
        if (dst.size() != static_cast<std::size_t>(sample))
            throw ParseError(source, t.row_lines[r], 2, "samples must be contiguous and in order");
        dst.push_back(v);
    }
    try
    {
        set.validate();
    }
    catch (const ValidationError &e)
    {
        throw ParseError(source, 1, 1, e.what());
    }
    return set;
}

// ---- Path loss samples -----------------------------------------------------

inline const std::string path_loss_columns = "env,scenario,v_mph,d_m,pl_db";

inline void write_path_loss_samples(std::ostream &os, std::span<const PathLossSample> samples, Metadata meta = {})
{
    meta_set(meta, "kind", "pathloss_samples");
    write_header(os, meta, path_loss_columns);
    for (const auto &s : samples)
        os << to_string(s.env) << "," << to_string(s.scenario) << "," << s.v_mph << "," << fmt(s.d) << ","
           << fmt(s.pl_db) << "\n";
}

inline std::vector<PathLossSample> read_path_loss_samples(std::istream &is, const std::string &source = "<pathloss>")
{
    const Table t = read_table(is, source, split_csv_line(path_loss_columns));
    std::vector<PathLossSample> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        PathLossSample s;
        try
        {
            s.env = parse_environment(t.rows[r][0]);
            s.scenario = parse_scenario(t.rows[r][1]);
        }
        catch (const ValidationError &e)
        {
            throw ParseError(source, t.row_lines[r], 1, e.what());
        }
        s.v_mph = static_cast<int>(t.integer(r, 2));
        s.d = t.number(r, 3);
        s.pl_db = t.number(r, 4);
        if (!(s.d > 0.0))
            throw ParseError(source, t.row_lines[r], 4, "distance must be > 0");
        out.push_back(s);
    }
    return out;
}

// ---- Analysis outputs ------------------------------------------------------

inline void write_pdp(std::ostream &os, const Pdp &pdp, Metadata meta = {})
{
    meta_set(meta, "kind", "pdp");
    write_header(os, meta, "delay_ns,power");
    for (const auto &b : pdp.bins)
        os << fmt(b.t) << "," << fmt(b.p) << "\n";
}

inline void write_cfr(std::ostream &os, const Cfr &c, Metadata meta = {})
{
    meta_set(meta, "kind", "cfr");
    meta_set(meta, "rf_band_hz", fmt(c.band_low_hz) + "-" + fmt(c.band_high_hz));
    write_header(os, meta, "freq_hz,mag_db");
    for (std::size_t k = 0; k < c.freqs.size(); ++k)
        os << fmt(c.freqs[k]) << "," << fmt(c.mag_db[k]) << "\n";
}

struct DelayStatsRow
{
    double height_m = 0.0;
    ScenarioId scenario = ScenarioId::S2_Ground1m5;
    DelayStats stats;
};

inline const std::string delay_stats_columns = "height_m,scenario,t_mean_ns,t_rms_ns,cb_hz";

inline void write_delay_stats(std::ostream &os, std::span<const DelayStatsRow> rows, Metadata meta = {})
{
    meta_set(meta, "kind", "delay_stats");
    write_header(os, meta, delay_stats_columns);
    for (const auto &r : rows)
        os << fmt(r.height_m) << "," << to_string(r.scenario) << "," << fmt(r.stats.t_mean) << ","
           << fmt(r.stats.t_rms) << "," << fmt(r.stats.cb_hz) << "\n";
}

inline std::vector<DelayStatsRow> read_delay_stats(std::istream &is, const std::string &source = "<stats>")
{
    const Table t = read_table(is, source, split_csv_line(delay_stats_columns));
    std::vector<DelayStatsRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        DelayStatsRow row;
        row.height_m = t.number(r, 0);
        try
        {
            row.scenario = parse_scenario(t.rows[r][1]);
        }
        catch (const ValidationError &e)
        {
            throw ParseError(source, t.row_lines[r], 2, e.what());
        }
        row.stats.t_mean = t.number(r, 2);
        row.stats.t_rms = t.number(r, 3);
        row.stats.cb_hz = t.number(r, 4);
        out.push_back(row);
    }
    return out;
}

inline void write_toa_cdf(std::ostream &os, std::span<const std::pair<double, double>> cdf, Metadata meta = {})
{
    meta_set(meta, "kind", "toa_cdf");
    write_header(os, meta, "toa_ns,cdf");
    for (const auto &[t, p] : cdf)
        os << fmt(t) << "," << fmt(p) << "\n";
}

inline void write_subband_stats(std::ostream &os, std::span<const SubbandStat> stats, Metadata meta = {})
{
    meta_set(meta, "kind", "subband_stats");
    write_header(os, meta, "center_hz,mean_db,var_db2");
    for (const auto &s : stats)
        os << fmt(s.center_hz) << "," << fmt(s.mean_db) << "," << fmt(s.var_db2) << "\n";
}

// ---- Fit reports -----------------------------------------------------------

struct ReportField
{
    std::string name;
    std::string unit;
    std::optional<double> estimate;
    std::optional<double> truth;
};

inline std::vector<ReportField> report_fields(const FitReport &r, const ScenarioPreset *truth = nullptr)
{
    auto t = [&](double v) { return truth ? std::optional<double>(v) : std::nullopt; };
    std::vector<ReportField> f{
        {"Lambda", "1/ns", r.Lambda_hat, truth ? t(truth->sv.Lambda) : std::nullopt},
        {"lambda", "1/ns", r.lambda_hat, truth ? t(truth->sv.lambda) : std::nullopt},
        {"mu", "ns", r.mu_hat, truth ? t(truth->sv.mu) : std::nullopt},
        {"beta", "ns", r.beta_hat, truth ? t(truth->sv.beta) : std::nullopt},
        {"c_bar", "", r.c_bar_hat, truth ? t(truth->sv.c_bar) : std::nullopt},
        {"eta", "dB", r.eta_hat, truth ? t(truth->nak.eta) : std::nullopt},
        {"xi", "", r.xi_hat, truth ? t(truth->nak.xi) : std::nullopt},
        {"m0", "", r.m0_hat, std::nullopt},
        {"v0", "", r.v0_hat, std::nullopt},
        {"alpha", "", r.alpha_hat, truth ? t(truth->pl.alpha) : std::nullopt},
        {"pl0", "dB", r.pl0_hat, truth ? t(truth->pl.pl0_db) : std::nullopt},
        {"sigma", "dB", r.sigma_hat, truth ? t(truth->pl.sigma_db) : std::nullopt},
    };
    return f;
}

inline const std::string report_columns = "parameter,unit,estimate,truth,abs_error,rel_error";

inline void write_fit_report_csv(std::ostream &os, const FitReport &r, const ScenarioPreset *truth = nullptr,
                                 Metadata meta = {})
{
    meta_set(meta, "kind", "fit_report");
    meta_set(meta, "label_source", r.diagnostics.label_source);
    meta_set(meta, "realizations", std::to_string(r.diagnostics.realizations));
    if (truth)
        meta_set(meta, "truth", truth->key());
    write_header(os, meta, report_columns);
    for (const auto &f : report_fields(r, truth))
    {
        if (!f.estimate)
            continue;
        os << f.name << "," << f.unit << "," << fmt(*f.estimate) << ",";
        if (f.truth)
            os << fmt(*f.truth) << "," << fmt(std::abs(*f.estimate - *f.truth)) << ","
               << fmt(std::abs(*f.estimate - *f.truth) / std::abs(*f.truth));
        else
            os << ",,";
        os << "\n";
    }
}

/// Human-readable report laid out like the parameter tables: one parameter per row.
/// With estimated_only, rows without an estimate are left out.
inline void write_fit_report_text(std::ostream &os, const FitReport &r, const ScenarioPreset *truth = nullptr,
                                  bool estimated_only = false)
{
    auto cell = [](std::optional<double> v) {
        if (!v)
            return std::string("-");
        return fmt(*v);
    };
    char line[160];
    os << "+----------------+--------------+--------------+------------+\n";
    std::snprintf(line, sizeof line, "| %-14s | %12s | %12s | %10s |\n", "Parameter", "Estimate", "Table", "Rel.err");
    os << line;
    os << "+----------------+--------------+--------------+------------+\n";
    for (const auto &f : report_fields(r, truth))
    {
        if (!f.estimate && (!f.truth || estimated_only))
            continue;
        const std::string name = f.unit.empty() ? f.name : f.name + " (" + f.unit + ")";
        std::string rel = "-";
        if (f.estimate && f.truth && *f.truth != 0.0)
        {
            char b[32];
            std::snprintf(b, sizeof b, "%.2f%%", 100.0 * std::abs(*f.estimate - *f.truth) / std::abs(*f.truth));
            rel = b;
        }
        std::snprintf(line, sizeof line, "| %-14s | %12s | %12s | %10s |\n", name.c_str(), cell(f.estimate).c_str(),
                      cell(f.truth).c_str(), rel.c_str());
        os << line;
    }
    os << "+----------------+--------------+--------------+------------+\n";
    const auto &d = r.diagnostics;
    os << "realizations: " << d.realizations << "   labels: " << d.label_source << "\n";
    if (d.cluster_gaps || d.ray_sequences || d.beta_points || d.mu_points)
        os << "cluster gaps: " << d.cluster_gaps << "   ray sequences: " << d.ray_sequences
           << "   beta points: " << d.beta_points << " (resid " << fmt(d.beta_residual_rms) << ")"
           << "   mu points: " << d.mu_points << " (resid " << fmt(d.mu_residual_rms) << ")\n";
    if (d.nakagami_bins)
        os << "nakagami bins: " << d.nakagami_bins << "\n";
    if (r.alpha_hat)
        os << "path loss residual rms: " << fmt(d.pathloss_residual_rms) << " dB\n";
    if (!d.cluster_count_histogram.empty())
    {
        os << "cluster count histogram:";
        for (const auto &[k, n] : d.cluster_count_histogram)
            os << " " << k << ":" << n;
        os << "\n";
    }
    for (const auto &n : d.notes)
        os << "note: " << n << "\n";
}

// ---- Preset registry -------------------------------------------------------

inline const std::string registry_columns =
    "env,scenario,v_mph,alpha,pl0_db,sigma_db,cp_db,x,f_e_hz,c_bar,Lambda_per_ns,lambda_per_ns,mu_ns,beta_ns,"
    "c_d,c_h,c_e,sigma_c_ns,sigma_N,mu_scale,eta_db,xi";

/// One row per (env, scenario, speed) preset with every model constant.
inline void write_preset_registry(std::ostream &os, std::span<const ScenarioPreset> presets, Metadata meta = {})
{
    meta_set(meta, "kind", "preset_registry");
    write_header(os, meta, registry_columns);
    for (const auto &p : presets)
        os << to_string(p.env) << "," << to_string(p.scenario) << "," << p.v_mph << "," << fmt(p.pl.alpha) << ","
           << fmt(p.pl.pl0_db) << "," << fmt(p.pl.sigma_db) << "," << fmt(p.pl.cp_db) << "," << fmt(p.pl.x) << ","
           << fmt(p.pl.f_e) << "," << fmt(p.sv.c_bar) << "," << fmt(p.sv.Lambda) << "," << fmt(p.sv.lambda) << ","
           << fmt(p.sv.mu) << "," << fmt(p.sv.beta) << "," << fmt(p.sv.c_d) << "," << fmt(p.sv.c_h) << ","
           << fmt(p.sv.c_e) << "," << fmt(p.sv.sigma_c) << "," << fmt(p.sv.sigma_N) << "," << fmt(p.sv.mu_scale)
           << "," << fmt(p.nak.eta) << "," << fmt(p.nak.xi) << "\n";
}

inline const std::string table_dump_columns =
    "table,env,scenario,v_mph,alpha,pl0_db,sigma_db,c_bar,Lambda_per_ns,lambda_per_ns,mu_ns,beta_ns,eta_db,xi";

/// The tabulated values as transcribed: 12 path loss rows, 6 PDP rows, 6 small-scale rows.
inline void write_table_dump(std::ostream &os, Metadata meta = {})
{
    meta_set(meta, "kind", "preset_tables");
    write_header(os, meta, table_dump_columns);
    for (const auto &r : tables::path_loss)
        os << "pathloss," << to_string(r.env) << "," << to_string(r.scenario) << "," << r.v_mph << ","
           << fmt(r.alpha) << "," << fmt(r.pl0_db) << "," << fmt(r.sigma_db) << ",,,,,,,\n";
    for (const auto &r : tables::pdp)
        os << "pdp," << to_string(r.env) << "," << to_string(r.scenario) << ",,,,," << fmt(r.c_bar) << ","
           << fmt(r.Lambda) << "," << fmt(r.lambda) << "," << fmt(r.mu) << "," << fmt(r.beta) << ",,\n";
    for (const auto &r : tables::small_scale)
        os << "smallscale," << to_string(r.env) << "," << to_string(r.scenario) << ",,,,,,,,,," << fmt(r.eta) << ","
           << fmt(r.xi) << "\n";
}

} // namespace uavuwb::io
