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

// Command-line front end. Each command is a plain function over a config struct so it can be
// driven from tests; run() maps an argument vector onto them with CLI11.
//
// Exit codes: 0 all outputs written, 1 runtime/insufficient-data error, 2 usage or validation error,
// 3 input parse error.

#include "io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <map>

namespace uavuwb::cli
{

inline constexpr const char *out_dir_env = "UAVUWB_OUT";
inline constexpr const char *default_out_dir_name = "uavuwb_out";

enum ExitCode : int
{
    ok = 0,
    runtime_error = 1,
    usage_error = 2,
    parse_error = 3,
};

/// Raised when a command ran but could not produce everything that was asked for.
struct InsufficientDataError : Error
{
    using Error::Error;
};

inline std::filesystem::path default_out_dir()
{
    if (const char *env = std::getenv(out_dir_env); env && *env)
        return env;
    return default_out_dir_name;
}

struct GlobalOptions
{
    std::uint64_t seed = 1;
    std::filesystem::path out;  // empty: default_out_dir()
    int format_version = io::format_version;

    std::filesystem::path out_dir() const { return out.empty() ? default_out_dir() : out; }
    void validate() const
    {
        require(format_version == io::format_version,
                "unsupported --format-version " + std::to_string(format_version) + " (supported: " +
                    std::to_string(io::format_version) + ")");
    }
};

struct PresetSelection
{
    std::string env = "open";
    std::string scenario = "s2";
    int v_mph = 0;

    const ScenarioPreset &preset() const
    {
        return preset_lookup(parse_environment(env), parse_scenario(scenario), v_mph);
    }
};

inline std::string height_tag(double h)
{
    std::string s = io::fmt(h);
    for (auto &c : s)
        if (c == '.')
            c = 'p';
    return "h" + s;
}

// ---- generate --------------------------------------------------------------

struct GenerateConfig
{
    PresetSelection preset;
    std::vector<double> heights{8.0};
    double d = 10.0;
    std::size_t n = 25;  // per height
    bool shadowing = true;
};

inline std::string cir_file_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "cir_%05zu.csv", index);
    return buf;
}

/// Rebuilds one CIR from a manifest entry; bitwise equal to the generated file content.
inline Cir regenerate(const io::Manifest &m, const io::ManifestEntry &e)
{
    const auto &preset = preset_lookup(e.env, e.scenario, e.v_mph);
    GeneratorOptions opt;
    opt.t_s = std::stod(io::meta_get(m.meta, "t_s_ns", io::fmt(constants::sample_period_ns)));
    opt.t_window = std::stod(io::meta_get(m.meta, "t_window_ns", io::fmt(constants::observation_window_ns)));
    opt.apply_shadowing = io::meta_get(m.meta, "shadowing", "1") == "1";
    RandomSource rng(e.seed, e.stream);
    return generate_cir(preset, preset.geometry(e.d_m, e.h_m), rng, opt);
}

inline io::Metadata run_metadata(const GlobalOptions &g, const ScenarioPreset *preset)
{
    io::Metadata meta{{"units", "time=ns distance=m power=linear frequency=Hz"},
                      {"seed", std::to_string(g.seed)}};
    if (preset)
        meta.emplace_back("preset", preset->key());
    meta.emplace_back("t_s_ns", io::fmt(constants::sample_period_ns));
    meta.emplace_back("t_window_ns", io::fmt(constants::observation_window_ns));
    meta.emplace_back("n_tot", std::to_string(constants::scans_per_set));
    for (auto &kv : io::radio_metadata())
        meta.push_back(kv);
    return meta;
}

/// Per-CIR CSV files plus manifest.csv. CIR k (counted across heights) uses stream k of the seed.
inline int cmd_generate(const GenerateConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    require(cfg.n > 0, "generate: --n must be > 0");
    require(!cfg.heights.empty(), "generate: at least one height is required");
    const auto &preset = cfg.preset.preset();
    for (double h : cfg.heights)
        preset.geometry(cfg.d, h).validate();

    const auto dir = g.out_dir();
    std::filesystem::create_directories(dir);

    GeneratorOptions opt;
    opt.apply_shadowing = cfg.shadowing;
    io::Manifest manifest;
    manifest.meta = run_metadata(g, &preset);
    io::meta_set(manifest.meta, "count", std::to_string(cfg.n * cfg.heights.size()));
    io::meta_set(manifest.meta, "shadowing", cfg.shadowing ? "1" : "0");
    io::meta_set(manifest.meta, "h_gnd_m", io::fmt(receiver_height_m(preset.scenario)));

    std::size_t k = 0;
    for (double h : cfg.heights)
    {
        const Geometry geom = preset.geometry(cfg.d, h);
        for (std::size_t i = 0; i < cfg.n; ++i, ++k)
        {
            RandomSource rng(g.seed, k);
            const Cir cir = generate_cir(preset, geom, rng, opt);
            io::ManifestEntry e{cir_file_name(k), g.seed, k, preset.env, preset.scenario, preset.v_mph, h, cfg.d};
            auto meta = run_metadata(g, &preset);
            io::meta_set(meta, "stream", std::to_string(k));
            io::meta_set(meta, "h_m", io::fmt(h));
            io::meta_set(meta, "d_m", io::fmt(cfg.d));
            io::write_file(dir / e.file, [&](std::ostream &os) { io::write_cir(os, cir, meta); });
            manifest.entries.push_back(std::move(e));
        }
    }
    io::write_file(dir / io::manifest_name, [&](std::ostream &os) { io::write_manifest(os, manifest); });
    log << "wrote " << k << " CIRs and " << io::manifest_name << " to " << dir.string() << "\n";
    return ok;
}

// ---- input loading ---------------------------------------------------------

struct LoadedInput
{
    std::vector<Cir> cirs;
    std::vector<double> heights;  // per CIR; NaN when unknown
    std::vector<bool> from_scans;  // per CIR: produced by CLEAN from a ScanSet
    std::optional<std::string> preset_key;
};

inline std::string peek_kind(const std::filesystem::path &path)
{
    std::ifstream is(path);
    std::string line;
    while (std::getline(is, line) && !line.empty() && line[0] == '#')
        if (auto p = line.find("kind="); p != std::string::npos)
        {
            auto v = line.substr(p + 5);
            if (!v.empty() && v.back() == '\r')
                v.pop_back();
            return v;
        }
    return {};
}

inline void add_scanset(LoadedInput &in, const ScanSet &set, const CleanConfig &clean)
{
    for (const auto &scan : set.scans)
    {
        in.cirs.push_back(clean_deconvolve(scan, set.template_pulse, set.t_s, clean).cir);
        in.heights.push_back(set.geometry.h_uav);
        in.from_scans.push_back(true);
    }
}

/// Reads a manifest-described ensemble, a directory of CIR/ScanSet files, or a single file.
inline LoadedInput load_input(const std::filesystem::path &path, const CleanConfig &clean = {})
{
    LoadedInput in;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!std::filesystem::exists(path))
        throw io::IoError("input path does not exist: " + path.string());

    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path))
    {
        const auto mpath = path / io::manifest_name;
        if (std::filesystem::exists(mpath))
        {
            std::ifstream is(mpath);
            const auto m = io::read_manifest(is, mpath.string());
            if (auto key = io::meta_get(m.meta, "preset"); !key.empty())
                in.preset_key = key;
            for (const auto &e : m.entries)
            {
                auto f = io::read_cir_file(path / e.file);
                in.cirs.push_back(std::move(f.cir));
                in.heights.push_back(e.h_m);
                in.from_scans.push_back(false);
            }
            return in;
        }
        for (const auto &entry : std::filesystem::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    }
    else
        files.push_back(path);
    const bool single = !std::filesystem::is_directory(path);

    for (const auto &f : files)
    {
        auto kind = peek_kind(f);
        // a single file without a kind header is read as a CIR so format errors surface
        if (single && kind.empty())
            kind = "cir";
        if (single && kind != "cir" && kind != "scanset")
            throw ValidationError("input " + f.string() + " has kind '" + kind + "', expected cir or scanset");
        if (kind == "cir")
        {
            auto c = io::read_cir_file(f);
            const auto h = io::meta_get(c.meta, "h_m");
            if (auto key = io::meta_get(c.meta, "preset"); !key.empty() && !in.preset_key)
                in.preset_key = key;
            in.cirs.push_back(std::move(c.cir));
            in.heights.push_back(h.empty() ? nan : std::stod(h));
            in.from_scans.push_back(false);
        }
        else if (kind == "scanset")
        {
            std::ifstream is(f);
            add_scanset(in, io::read_scanset(is, f.string()), clean);
        }
    }
    return in;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeConfig
{
    std::filesystem::path input;  // empty: synthetic height sweep over the preset
    PresetSelection preset;
    std::vector<double> heights{survey_heights_m.begin(), survey_heights_m.end()};
    double d = 10.0;
    std::size_t n = 200;  // per height, synthetic mode
    double threshold_db = default_mpc_threshold_db;
    std::optional<double> freq_exponent;  // default: preset value for synthetic data, 0 otherwise
    double subband_width_hz = 150e6;
};

/// Writes, per height group, pdp_<h>.csv, cfr_<h>.csv, toa_cdf_<h>.csv and subband_<h>.csv, plus
/// delay_stats.csv with one row per group. ScanSets are deconvolved with CLEAN scan by scan.
inline int cmd_analyze(const AnalyzeConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    LoadedInput in;
    const ScenarioPreset *preset = nullptr;
    bool synthetic = false;
    if (cfg.input.empty())
    {
        require(cfg.n > 0, "analyze: --n must be > 0");
        require(!cfg.heights.empty(), "analyze: at least one height is required");
        preset = &cfg.preset.preset();
        std::size_t k = 0;
        for (double h : cfg.heights)
        {
            const Geometry geom = preset->geometry(cfg.d, h);
            geom.validate();
            for (std::size_t i = 0; i < cfg.n; ++i, ++k)
            {
                RandomSource rng(g.seed, k);
                in.cirs.push_back(generate_cir(*preset, geom, rng));
                in.heights.push_back(h);
                in.from_scans.push_back(false);
            }
        }
        synthetic = true;
    }
    else
    {
        in = load_input(cfg.input);
        if (in.preset_key)
        {
            preset = &preset_lookup(*in.preset_key);
            synthetic = std::none_of(in.from_scans.begin(), in.from_scans.end(), [](bool b) { return b; });
        }
    }
    if (in.cirs.empty())
        throw InsufficientDataError("analyze: no CIR or ScanSet input found");

    // group by height, NaN heights form one group
    std::map<double, std::vector<Cir>> groups;
    std::vector<Cir> unknown;
    for (std::size_t i = 0; i < in.cirs.size(); ++i)
        (std::isnan(in.heights[i]) ? unknown : groups[in.heights[i]]).push_back(in.cirs[i]);

    SubbandConfig sb;
    sb.band_width_hz = cfg.subband_width_hz;
    sb.freq_exponent = cfg.freq_exponent.value_or(synthetic && preset ? preset->pl.x : 0.0);

    auto meta = run_metadata(g, preset);
    if (!cfg.input.empty())
        io::meta_set(meta, "input", cfg.input.string());
    const auto dir = g.out_dir();
    std::filesystem::create_directories(dir);

    std::vector<io::DelayStatsRow> rows;
    const ScenarioId scenario = preset ? preset->scenario : ScenarioId::S2_Ground1m5;
    auto emit = [&](const std::string &tag, double h, const std::vector<Cir> &cirs) {
        auto m = meta;
        io::meta_set(m, "realizations", std::to_string(cirs.size()));
        if (!std::isnan(h))
            io::meta_set(m, "h_m", io::fmt(h));
        const Pdp pdp = average_pdp(cirs);
        io::write_file(dir / ("pdp_" + tag + ".csv"), [&](std::ostream &os) { io::write_pdp(os, pdp, m); });
        const Cfr c = cfr(cirs.front());
        auto mc = m;
        io::meta_set(mc, "realization", "0");
        io::write_file(dir / ("cfr_" + tag + ".csv"), [&](std::ostream &os) { io::write_cfr(os, c, mc); });
        const auto toa = toa_cdf(cirs, cfg.threshold_db);
        auto mt = m;
        io::meta_set(mt, "threshold_db", io::fmt(cfg.threshold_db));
        io::write_file(dir / ("toa_cdf_" + tag + ".csv"), [&](std::ostream &os) { io::write_toa_cdf(os, toa, mt); });
        const auto sub = subband_power_stats(cirs, sb);
        auto ms = m;
        io::meta_set(ms, "freq_exponent", io::fmt(sb.freq_exponent));
        io::meta_set(ms, "band_width_hz", io::fmt(sb.band_width_hz));
        io::write_file(dir / ("subband_" + tag + ".csv"),
                       [&](std::ostream &os) { io::write_subband_stats(os, sub, ms); });
        rows.push_back({h, scenario, delay_stats(pdp)});
    };
    for (const auto &[h, cirs] : groups)
        emit(height_tag(h), h, cirs);
    if (!unknown.empty())
        emit("all", std::numeric_limits<double>::quiet_NaN(), unknown);

    io::write_file(dir / "delay_stats.csv", [&](std::ostream &os) { io::write_delay_stats(os, rows, meta); });
    log << "analyzed " << in.cirs.size() << " CIRs in " << rows.size() << " group(s); outputs in " << dir.string()
        << "\n";
    return ok;
}

// ---- fit -------------------------------------------------------------------

enum class LabelSource
{
    Truth,  // cluster column of the input files
    Gap,    // gap rule
};

struct FitConfig
{
    std::filesystem::path input;
    std::optional<std::string> truth;  // preset key for error columns
    LabelSource labels = LabelSource::Gap;
    std::optional<double> gap_ns;  // default: 5 / lambda of the --truth or input preset
    std::size_t min_realizations = 10;
};

/// Energy normalization per realization so that shadowing and distance do not enter the
/// per-bin amplitude statistics.
inline std::vector<Cir> unit_energy(std::span<const Cir> cirs)
{
    std::vector<Cir> out(cirs.begin(), cirs.end());
    for (auto &c : out)
        if (const double e = c.energy(); e > 0.0)
            for (auto &t : c.taps)
                t.a /= std::sqrt(e);
    return out;
}

/// Writes fit_report.csv and fit_report.txt. Returns 1 with a partial report when some SV
/// parameter could not be estimated; writes nothing when there is no input at all.
inline int cmd_fit(const FitConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    const ScenarioPreset *truth = cfg.truth ? &preset_lookup(*cfg.truth) : nullptr;
    const LoadedInput in = load_input(cfg.input);
    if (in.cirs.empty())
        throw InsufficientDataError("fit: no CIR or ScanSet input found in " + cfg.input.string());

    SvFitOptions opt;
    opt.min_realizations = cfg.min_realizations;
    LabelSource labels = cfg.labels;
    const bool any_scans = std::any_of(in.from_scans.begin(), in.from_scans.end(), [](bool b) { return b; });
    if (any_scans && labels == LabelSource::Truth)
        labels = LabelSource::Gap;  // deconvolved scans carry no cluster labels
    if (labels == LabelSource::Gap)
    {
        opt.labels = ClusterLabels::GapRule;
        if (cfg.gap_ns)
            opt.gap_ns = *cfg.gap_ns;
        else if (truth)
            opt.gap_ns = default_cluster_gap_ns(truth->sv);
        else if (in.preset_key)
            opt.gap_ns = default_cluster_gap_ns(preset_lookup(*in.preset_key).sv);
        else
            throw ValidationError("fit: gap-rule labelling needs --gap-ns or --truth");
    }

    FitReport rep = fit_sv_params(in.cirs, opt);
    rep.diagnostics.label_source = labels == LabelSource::Truth
                                       ? "ground-truth (cluster column of input files)"
                                       : "gap rule, gap " + io::fmt(opt.gap_ns) + " ns";
    if (any_scans && cfg.labels == LabelSource::Truth)
        rep.diagnostics.notes.push_back("ScanSet input has no cluster labels; used the gap rule");

    const auto nf = fit_nakagami(unit_energy(in.cirs));
    rep.eta_hat = nf.report.eta_hat;
    rep.xi_hat = nf.report.xi_hat;
    rep.m0_hat = nf.report.m0_hat;
    rep.v0_hat = nf.report.v0_hat;
    rep.diagnostics.nakagami_bins = nf.report.diagnostics.nakagami_bins;
    for (const auto &n : nf.report.diagnostics.notes)
        rep.diagnostics.notes.push_back(n);

    const auto dir = g.out_dir();
    std::filesystem::create_directories(dir);
    auto meta = run_metadata(g, truth);
    io::meta_set(meta, "input", cfg.input.string());
    io::write_file(dir / "fit_report.csv", [&](std::ostream &os) { io::write_fit_report_csv(os, rep, truth, meta); });
    std::ostringstream text;
    io::write_fit_report_text(text, rep, truth);
    io::write_file(dir / "fit_report.txt", [&](std::ostream &os) { os << text.str(); });
    log << text.str();

    if (!rep.complete_sv())
    {
        log << "fit: incomplete report (see notes)\n";
        return runtime_error;
    }
    return ok;
}

// ---- pathloss --------------------------------------------------------------

struct PathLossEvalConfig
{
    PresetSelection preset;
    double d = 10.0;
    double h = 8.0;
    std::optional<double> h_gnd, h_opt;  // default: scenario receiver height, 1.5 m
    std::optional<double> shadow_db;
    bool doppler = false;
};

inline Geometry path_loss_geometry(const ScenarioPreset &p, double d, double h, std::optional<double> h_gnd,
                                   std::optional<double> h_opt)
{
    Geometry geom = p.geometry(d, h);
    if (h_gnd)
        geom.h_gnd = *h_gnd;
    if (h_opt)
        geom.h_opt = *h_opt;
    return geom;
}

inline int cmd_pathloss_eval(const PathLossEvalConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    const auto &p = cfg.preset.preset();
    const Geometry geom = path_loss_geometry(p, cfg.d, cfg.h, cfg.h_gnd, cfg.h_opt);
    const double pl = cfg.doppler ? path_loss_doppler(geom, p.pl, cfg.shadow_db) : path_loss_static(geom, p.pl, cfg.shadow_db);
    log << io::fmt(pl) << "\n";
    return ok;
}

struct PathLossGenerateConfig
{
    PresetSelection preset;
    std::size_t n = 10000;
    double d_min = 5.6;
    double d_max = 16.5;
    double h = 8.0;
    std::optional<double> h_gnd, h_opt;
};

inline int cmd_pathloss_generate(const PathLossGenerateConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    require(cfg.n > 0, "pathloss generate: --n must be > 0");
    const auto &p = cfg.preset.preset();
    RandomSource rng(g.seed, 0);
    const Geometry geom = path_loss_geometry(p, cfg.d_min, cfg.h, cfg.h_gnd, cfg.h_opt);
    const auto samples = generate_path_loss_samples(p, geom, cfg.n, cfg.d_min, cfg.d_max, rng);
    auto meta = run_metadata(g, &p);
    io::meta_set(meta, "h_gnd_m", io::fmt(geom.h_gnd));
    io::meta_set(meta, "h_opt_m", io::fmt(geom.h_opt));
    io::meta_set(meta, "d_range_m", io::fmt(cfg.d_min) + "-" + io::fmt(cfg.d_max));
    const auto path = g.out_dir() / "pathloss_samples.csv";
    io::write_file(path, [&](std::ostream &os) { io::write_path_loss_samples(os, samples, meta); });
    log << "wrote " << samples.size() << " samples to " << path.string() << "\n";
    return ok;
}

struct PathLossFitConfig
{
    std::filesystem::path input;
    double d0 = 1.0;
    std::optional<std::string> truth;
};

inline int cmd_pathloss_fit(const PathLossFitConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    const ScenarioPreset *truth = cfg.truth ? &preset_lookup(*cfg.truth) : nullptr;
    std::ifstream is(cfg.input);
    if (!is)
        throw io::IoError("cannot open " + cfg.input.string());
    const auto samples = io::read_path_loss_samples(is, cfg.input.string());
    FitReport rep;
    rep.diagnostics.realizations = samples.size();
    rep.diagnostics.label_source = "n/a";
    fill_path_loss(rep, samples, cfg.d0);
    auto meta = run_metadata(g, truth);
    io::meta_set(meta, "d0_m", io::fmt(cfg.d0));
    const auto dir = g.out_dir();
    io::write_file(dir / "pathloss_fit.csv", [&](std::ostream &os) { io::write_fit_report_csv(os, rep, truth, meta); });
    io::write_fit_report_text(log, rep, truth, true);
    return ok;
}

// ---- presets ---------------------------------------------------------------

struct PresetsConfig
{
    bool write_files = false;
};

/// Prints the tabulated values; with write_files also exports presets.csv (the same dump) and
/// preset_registry.csv (every model constant of the 12 presets).
inline int cmd_presets(const PresetsConfig &cfg, const GlobalOptions &g, std::ostream &log)
{
    g.validate();
    io::write_table_dump(log);
    if (cfg.write_files)
    {
        const auto dir = g.out_dir();
        io::write_file(dir / "presets.csv", [&](std::ostream &os) { io::write_table_dump(os); });
        io::write_file(dir / "preset_registry.csv",
                       [&](std::ostream &os) { io::write_preset_registry(os, all_presets()); });
    }
    return ok;
}

// ---- argument parsing ------------------------------------------------------

inline void add_preset_options(CLI::App *cmd, PresetSelection &p, bool required)
{
    auto *e = cmd->add_option("--env", p.env, "Environment: open | suburban")->check(CLI::IsMember({"open", "suburban"}));
    auto *s = cmd->add_option("--scenario", p.scenario, "Scenario: 1|2|3 or s1|s2|s3");
    auto *v = cmd->add_option("--v", p.v_mph, "UAV speed label in mph: 0 | 20");
    if (required)
    {
        e->required();
        s->required();
        v->required();
    }
}

/// Parses and runs one command line (without the program name).
inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"UWB air-to-ground channel simulator and parameter estimator", "uavuwb"};
    app.fallthrough();
    app.require_subcommand(1);
    // "--h" is the height option, so help is long-form only (inherited by subcommands)
    app.set_help_flag("--help", "Print this help message and exit");

    GlobalOptions g;
    std::string out_dir;
    app.add_option("--seed", g.seed, "Random seed (written into every output)");
    app.add_option("--out", out_dir, std::string("Output directory (default: $") + out_dir_env + " or " +
                                         default_out_dir_name + ")");
    app.add_option("--format-version", g.format_version, "Output file format version");

    std::function<int()> action;

    GenerateConfig gen;
    auto *c_gen = app.add_subcommand("generate", "Generate a CIR ensemble and its manifest");
    add_preset_options(c_gen, gen.preset, true);
    c_gen->add_option("--h", gen.heights, "UAV height(s) in m");
    c_gen->add_option("--d", gen.d, "Horizontal distance in m");
    c_gen->add_option("--n", gen.n, "Realizations per height");
    bool no_shadowing = false;
    c_gen->add_flag("--no-shadowing", no_shadowing, "Disable log-normal shadowing");
    c_gen->callback([&] {
        gen.shadowing = !no_shadowing;
        action = [&] { return cmd_generate(gen, g, out); };
    });

    AnalyzeConfig an;
    std::string an_in;
    std::optional<double> an_x;
    auto *c_an = app.add_subcommand("analyze", "PDP, CFR, delay statistics, TOA CDF and sub-band statistics");
    c_an->add_option("--in", an_in, "Ensemble directory, CIR file or ScanSet file (default: synthetic sweep)");
    add_preset_options(c_an, an.preset, false);
    c_an->add_option("--h", an.heights, "UAV heights for the synthetic sweep");
    c_an->add_option("--d", an.d, "Horizontal distance in m (synthetic sweep)");
    c_an->add_option("--n", an.n, "Realizations per height (synthetic sweep)");
    c_an->add_option("--threshold-db", an.threshold_db, "MPC threshold relative to the strongest tap");
    c_an->add_option("--freq-exponent", an_x, "Frequency exponent for sub-band statistics");
    c_an->add_option("--subband-width", an.subband_width_hz, "Sub-band width in Hz");
    c_an->callback([&] {
        an.input = an_in;
        an.freq_exponent = an_x;
        action = [&] { return cmd_analyze(an, g, out); };
    });

    FitConfig fit;
    std::string fit_in, fit_truth, fit_labels = "gap";
    std::optional<double> fit_gap;
    auto *c_fit = app.add_subcommand("fit", "Estimate channel parameters from an ensemble");
    c_fit->add_option("--in", fit_in, "Ensemble directory or file")->required();
    c_fit->add_option("--truth", fit_truth, "Preset key (env/sN/vM) for error columns");
    c_fit->add_option("--labels", fit_labels, "Cluster labels: gap (gap rule, default) | truth (cluster column of the input)")->check(CLI::IsMember({"truth", "gap"}));
    c_fit->add_option("--gap-ns", fit_gap, "Gap threshold for the gap rule in ns");
    c_fit->add_option("--min-realizations", fit.min_realizations, "Minimum ensemble size");
    c_fit->callback([&] {
        fit.input = fit_in;
        if (!fit_truth.empty())
            fit.truth = fit_truth;
        fit.labels = fit_labels == "gap" ? LabelSource::Gap : LabelSource::Truth;
        fit.gap_ns = fit_gap;
        action = [&] { return cmd_fit(fit, g, out); };
    });

    auto *c_pl = app.add_subcommand("pathloss", "Path loss evaluation, sample generation and fitting");
    c_pl->require_subcommand(1);
    PathLossEvalConfig ple;
    std::optional<double> ple_shadow;
    auto *c_ple = c_pl->add_subcommand("eval", "Evaluate the path loss model in dB");
    add_preset_options(c_ple, ple.preset, true);
    c_ple->add_option("--d", ple.d, "Horizontal distance in m");
    c_ple->add_option("--h", ple.h, "UAV height in m");
    c_ple->add_option("--h-gnd", ple.h_gnd, "Receiver height in m (default: scenario value)");
    c_ple->add_option("--h-opt", ple.h_opt, "Optimum receiver height in m (default: 1.5)");
    c_ple->add_option("--shadow-db", ple_shadow, "Shadowing realization in dB");
    c_ple->add_flag("--doppler", ple.doppler, "Include the speed-dependent term");
    c_ple->callback([&] {
        ple.shadow_db = ple_shadow;
        action = [&] { return cmd_pathloss_eval(ple, g, out); };
    });
    PathLossGenerateConfig plg;
    auto *c_plg = c_pl->add_subcommand("generate", "Draw path loss samples");
    add_preset_options(c_plg, plg.preset, true);
    c_plg->add_option("--n", plg.n, "Number of samples");
    c_plg->add_option("--dmin", plg.d_min, "Minimum distance in m");
    c_plg->add_option("--dmax", plg.d_max, "Maximum distance in m");
    c_plg->add_option("--h", plg.h, "UAV height in m");
    c_plg->add_option("--h-gnd", plg.h_gnd, "Receiver height in m (default: scenario value)");
    c_plg->add_option("--h-opt", plg.h_opt, "Optimum receiver height in m (default: 1.5)");
    c_plg->callback([&] { action = [&] { return cmd_pathloss_generate(plg, g, out); }; });
    PathLossFitConfig plf;
    std::string plf_in, plf_truth;
    auto *c_plf = c_pl->add_subcommand("fit", "Fit the log-distance model to samples");
    c_plf->add_option("--in", plf_in, "Path loss sample CSV")->required();
    c_plf->add_option("--d0", plf.d0, "Reference distance in m");
    c_plf->add_option("--truth", plf_truth, "Preset key (env/sN/vM) for error columns");
    c_plf->callback([&] {
        plf.input = plf_in;
        if (!plf_truth.empty())
            plf.truth = plf_truth;
        action = [&] { return cmd_pathloss_fit(plf, g, out); };
    });

    PresetsConfig pre;
    auto *c_pre = app.add_subcommand("presets", "Print the preset tables (and export them with --out)");
    c_pre->callback([&] { action = [&] { return cmd_presets(pre, g, out); }; });

    std::reverse(args.begin(), args.end());
    try
    {
        app.parse(args);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }
    g.out = out_dir;
    const char *env_out = std::getenv(out_dir_env);
    pre.write_files = !out_dir.empty() || (env_out && *env_out);

    try
    {
        return action ? action() : usage_error;
    }
    catch (const io::ParseError &e)
    {
        err << "parse error: " << e.what() << "\n";
        return parse_error;
    }
    catch (const ValidationError &e)
    {
        err << "validation error: " << e.what() << "\n";
        return usage_error;
    }
    catch (const PresetNotFoundError &e)
    {
        err << "preset error: " << e.what() << "\n";
        return usage_error;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return runtime_error;
    }
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace uavuwb::cli
