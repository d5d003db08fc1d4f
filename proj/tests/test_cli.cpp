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
#include "uavuwb/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace uavuwb;
using Catch::Approx;
namespace fs = std::filesystem;
namespace ts = testing_support;

namespace
{
struct Result
{
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

/// Fresh empty directory under the system temp dir.
fs::path scratch(const std::string &name)
{
    const auto dir = fs::temp_directory_path() / ("uavuwb_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::size_t csv_files(const fs::path &dir)
{
    std::size_t n = 0;
    for (const auto &e : fs::directory_iterator(dir))
        n += e.path().extension() == ".csv";
    return n;
}

std::vector<io::DelayStatsRow> delay_rows(const fs::path &dir)
{
    std::ifstream is(dir / "delay_stats.csv");
    return io::read_delay_stats(is);
}

std::map<std::string, double> report_estimates(const fs::path &file)
{
    std::ifstream is(file);
    const auto t = io::read_table(is, file.string(), io::split_csv_line(io::report_columns));
    std::map<std::string, double> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        out[t.rows[r][0]] = t.number(r, 2);
    return out;
}
} // namespace

TEST_CASE("cli - generate")
{
    const auto dir = scratch("generate");
    const auto a = dir / "a", b = dir / "b";
    const std::vector<std::string> args{"generate", "--env", "open", "--scenario", "2", "--v", "0", "--h", "8",
                                        "--d",      "10",    "--n",  "25",         "--seed", "7"};
    auto with_out = [&](const fs::path &p) {
        auto v = args;
        v.insert(v.end(), {"--out", p.string()});
        return v;
    };
    const auto r = run(with_out(a));
    REQUIRE(r.code == cli::ok);
    CHECK(csv_files(a) == 26);
    CHECK(fs::exists(a / "manifest.csv"));
    CHECK(fs::exists(a / "cir_00024.csv"));

    // same command twice: identical bytes
    REQUIRE(run(with_out(b)).code == cli::ok);
    for (const auto &e : fs::directory_iterator(a))
        REQUIRE(slurp(e.path()) == slurp(b / e.path().filename()));

    // every output carries the seed and the format version
    const auto first = slurp(a / "cir_00003.csv");
    CHECK(first.rfind("# format_version=1\n", 0) == 0);
    CHECK(first.find("# seed=7\n") != std::string::npos);
    CHECK(first.find("# stream=3\n") != std::string::npos);

    // a different seed changes the data
    auto other = with_out(dir / "c");
    other[14] = "8";
    REQUIRE(run(other).code == cli::ok);
    CHECK(slurp(dir / "c" / "cir_00000.csv") != slurp(a / "cir_00000.csv"));

    // manifest entries regenerate their files exactly
    std::ifstream ms(a / "manifest.csv");
    const auto m = io::read_manifest(ms);
    REQUIRE(m.entries.size() == 25);
    for (const auto &e : m.entries)
    {
        const auto file = io::read_cir_file(a / e.file);
        const Cir again = cli::regenerate(m, e);
        std::ostringstream os;
        io::write_cir(os, again, file.meta);
        REQUIRE(os.str() == slurp(a / e.file));
    }

    // several heights: stream index runs across them
    REQUIRE(run({"generate", "--env", "suburban", "--scenario", "s3", "--v", "20", "--h", "4", "12", "--n", "3",
                 "--out", (dir / "h").string(), "--no-shadowing"})
                .code == cli::ok);
    CHECK(csv_files(dir / "h") == 7);
    CHECK(slurp(dir / "h" / "cir_00005.csv").find("# h_m=12\n") != std::string::npos);
    CHECK(slurp(dir / "h" / "manifest.csv").find("# shadowing=0\n") != std::string::npos);

    // validation
    const auto bad = run({"generate", "--env", "open", "--scenario", "2", "--v", "0", "--n", "0", "--out",
                          (dir / "zero").string()});
    CHECK(bad.code == cli::usage_error);
    CHECK(bad.err.find("--n") != std::string::npos);
    CHECK(run({"generate", "--env", "open", "--scenario", "2", "--v", "5"}).code == cli::usage_error);
    CHECK(run({"generate", "--env", "desert", "--scenario", "2", "--v", "0"}).code == cli::usage_error);
    CHECK(run({"generate", "--env", "open", "--scenario", "2", "--v", "0", "--h", "-1", "--out",
               (dir / "neg").string()})
              .code == cli::usage_error);
    CHECK(run({"generate", "--scenario", "2", "--v", "0"}).code == cli::usage_error);
    fs::remove_all(dir);
}

TEST_CASE("cli - analyze")
{
    const auto dir = scratch("analyze");

    // single tap: zero delay spread
    Cir one;
    one.taps = {{12.0, 0.5, 0}};
    io::write_file(dir / "one" / "tap.csv", [&](std::ostream &os) { io::write_cir(os, one); });
    REQUIRE(run({"analyze", "--in", (dir / "one" / "tap.csv").string(), "--out", (dir / "o1").string()}).code ==
            cli::ok);
    const auto r1 = delay_rows(dir / "o1");
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].stats.t_rms == 0.0);
    CHECK(r1[0].stats.t_mean == Approx(12.0).epsilon(1e-12));
    CHECK(fs::exists(dir / "o1" / "pdp_all.csv"));
    CHECK(fs::exists(dir / "o1" / "cfr_all.csv"));
    CHECK(fs::exists(dir / "o1" / "toa_cdf_all.csv"));
    CHECK(fs::exists(dir / "o1" / "subband_all.csv"));

    // synthetic sweep over the survey heights
    REQUIRE(run({"analyze", "--env", "open", "--scenario", "s3", "--v", "0", "--n", "20", "--out",
                 (dir / "sweep").string()})
                .code == cli::ok);
    const auto sweep = delay_rows(dir / "sweep");
    REQUIRE(sweep.size() == 4);
    CHECK(sweep[0].height_m == 4.0);
    CHECK(sweep[3].height_m == 16.0);
    for (const auto &row : sweep)
    {
        CHECK(row.stats.t_rms > 0.0);
        CHECK(row.stats.t_rms < 20.0);
    }
    CHECK(fs::exists(dir / "sweep" / "pdp_h12.csv"));

    // generated ensemble directory
    REQUIRE(run({"generate", "--env", "open", "--scenario", "1", "--v", "0", "--h", "4", "8", "--n", "10", "--out",
                 (dir / "gen").string()})
                .code == cli::ok);
    REQUIRE(run({"analyze", "--in", (dir / "gen").string(), "--out", (dir / "o2").string()}).code == cli::ok);
    CHECK(delay_rows(dir / "o2").size() == 2);
    CHECK(slurp(dir / "o2" / "subband_h4.csv").find("# freq_exponent=") != std::string::npos);

    // 25-scan set: CLEAN on every scan, PDP from the deconvolved taps
    ScanSet set;
    set.template_pulse = ts::monocycle();
    const auto scan = ts::synth_scan({{100, 1.0}, {200, 1.0}}, set.template_pulse, 1666);
    set.scans.assign(25, scan);
    set.geometry.h_uav = 8.0;
    io::write_file(dir / "scans" / "set.csv", [&](std::ostream &os) { io::write_scanset(os, set); });
    REQUIRE(run({"analyze", "--in", (dir / "scans").string(), "--out", (dir / "o3").string()}).code == cli::ok);
    const auto r3 = delay_rows(dir / "o3");
    REQUIRE(r3.size() == 1);
    // two equal taps 100 samples (6 ns) apart
    CHECK(r3[0].stats.t_rms == Approx(3.0).epsilon(1e-6));

    // errors
    const auto missing = run({"analyze", "--in", (dir / "nope").string(), "--out", (dir / "o4").string()});
    CHECK(missing.code == cli::runtime_error);
    std::ofstream(dir / "bad.csv") << "# format_version=1\ntau_ns,amplitude,cluster\n0,oops,0\n";
    const auto bad = run({"analyze", "--in", (dir / "bad.csv").string(), "--out", (dir / "o5").string()});
    CHECK(bad.code == cli::parse_error);
    CHECK(bad.err.find("bad.csv:3:2") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli - fit")
{
    const auto dir = scratch("fit");
    const auto gen = dir / "gen";
    REQUIRE(run({"generate", "--env", "open", "--scenario", "2", "--v", "0", "--h", "4", "8", "12", "16", "--n",
                 "250", "--seed", "7", "--out", gen.string()})
                .code == cli::ok);

    const auto r = run({"fit", "--in", gen.string(), "--labels", "truth", "--truth", "open/s2/v0", "--out",
                        (dir / "f").string()});
    REQUIRE(r.code == cli::ok);
    CHECK(r.out.find("Lambda") != std::string::npos);
    const auto est = report_estimates(dir / "f" / "fit_report.csv");
    CHECK(est.at("Lambda") == Approx(0.09).epsilon(0.10));
    CHECK(est.at("lambda") == Approx(2.210).epsilon(0.10));
    CHECK(est.at("mu") == Approx(2.91).epsilon(0.15));
    CHECK(est.at("beta") == Approx(0.9069).epsilon(0.15));
    CHECK(est.count("eta") == 1);
    const auto txt = slurp(dir / "f" / "fit_report.txt");
    CHECK(txt.find("ground-truth") != std::string::npos);
    CHECK(slurp(dir / "f" / "fit_report.csv").find("# truth=open/s2/v0\n") != std::string::npos);

    // gap-rule labels (the default) are recorded in both outputs
    REQUIRE(run({"fit", "--in", gen.string(), "--gap-ns", "3", "--out", (dir / "g").string()}).code == cli::ok);
    CHECK(slurp(dir / "g" / "fit_report.txt").find("labels: gap rule, gap 3 ns") != std::string::npos);
    CHECK(slurp(dir / "g" / "fit_report.csv").find("# label_source=gap rule, gap 3 ns\n") != std::string::npos);

    // empty input: nonzero exit and no output files
    fs::create_directories(dir / "empty");
    const auto e = run({"fit", "--in", (dir / "empty").string(), "--out", (dir / "e").string()});
    CHECK(e.code != cli::ok);
    CHECK_FALSE(fs::exists(dir / "e"));

    // too few realizations: partial report, exit 1
    REQUIRE(run({"generate", "--env", "open", "--scenario", "2", "--v", "0", "--n", "5", "--out",
                 (dir / "few").string()})
                .code == cli::ok);
    const auto few = run({"fit", "--in", (dir / "few").string(), "--out", (dir / "fo").string()});
    CHECK(few.code == cli::runtime_error);
    CHECK(slurp(dir / "fo" / "fit_report.txt").find("fewer than 10 realizations") != std::string::npos);

    CHECK(run({"fit", "--in", gen.string(), "--truth", "open/s9/v0", "--out", (dir / "x").string()}).code ==
          cli::usage_error);
    CHECK(run({"fit", "--in", gen.string(), "--labels", "magic"}).code == cli::usage_error);

    // gap rule without any source for the gap threshold
    Cir c;
    c.taps = {{0.0, 1.0, 0}, {30.0, 0.5, 1}};
    for (int i = 0; i < 10; ++i)
        io::write_file(dir / "bare" / ("c" + std::to_string(i) + ".csv"), [&](std::ostream &os) { io::write_cir(os, c); });
    CHECK(run({"fit", "--in", (dir / "bare").string(), "--out", (dir / "b").string()}).code == cli::usage_error);
    const auto bare = run({"fit", "--in", (dir / "bare").string(), "--labels", "truth", "--out", (dir / "b").string()});
    CHECK(bare.out.find("ground-truth") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli - pathloss")
{
    const auto dir = scratch("pathloss");
    // receiver at 3 m: the height term vanishes
    const auto e = run({"pathloss", "eval", "--env", "open", "--scenario", "2", "--v", "0", "--d", "10", "--h-gnd",
                        "3"});
    REQUIRE(e.code == cli::ok);
    CHECK(std::stod(e.out) == Approx(50.4145).epsilon(1e-9));
    // scenario receiver height equals h_opt: clamped +20 dB
    const auto c = run({"pathloss", "eval", "--env", "open", "--scenario", "2", "--v", "0", "--d", "10"});
    CHECK(std::stod(c.out) == Approx(70.4145).epsilon(1e-9));

    REQUIRE(run({"pathloss", "generate", "--env", "suburban", "--scenario", "3", "--v", "20", "--n", "2000",
                 "--h-gnd", "3", "--out", dir.string()})
                .code == cli::ok);
    REQUIRE(run({"pathloss", "fit", "--in", (dir / "pathloss_samples.csv").string(), "--truth", "suburban/s3/v20",
                 "--out", dir.string()})
                .code == cli::ok);
    const auto est = report_estimates(dir / "pathloss_fit.csv");
    const auto &p = preset_lookup("suburban/s3/v20");
    CHECK(est.at("alpha") == Approx(p.pl.alpha).margin(0.3));
    CHECK(est.at("sigma") == Approx(p.pl.sigma_db).margin(0.5));
    CHECK(est.count("Lambda") == 0);

    CHECK(run({"pathloss"}).code == cli::usage_error);
    CHECK(run({"pathloss", "fit", "--in", (dir / "none.csv").string(), "--out", dir.string()}).code ==
          cli::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("cli - presets and global options")
{
    const auto r = run({"presets"});
    REQUIRE(r.code == cli::ok);
    std::istringstream is(r.out);
    const auto t = io::read_table(is, "presets", io::split_csv_line(io::table_dump_columns));
    CHECK(t.rows.size() == 24);
    CHECK(r.out.find("\npathloss,open,s2,0,2.5418,24.9965,3.06,") != std::string::npos);
    CHECK(r.out.find("\npdp,open,s2,,,,,2.33,0.09,2.21,2.91,0.9069,,\n") != std::string::npos);
    CHECK(r.out.find("\nsmallscale,open,s2,,,,,,,,,,1.67,0.64\n") != std::string::npos);

    const auto dir = scratch("presets");
    REQUIRE(run({"presets", "--out", dir.string()}).code == cli::ok);
    CHECK(slurp(dir / "presets.csv") == r.out);
    CHECK(fs::exists(dir / "preset_registry.csv"));

    // output directory from the environment
    const auto env_dir = dir / "from_env";
    ::setenv(cli::out_dir_env, env_dir.c_str(), 1);
    CHECK(cli::default_out_dir() == env_dir);
    const auto g = run({"generate", "--env", "open", "--scenario", "2", "--v", "0", "--n", "2"});
    ::unsetenv(cli::out_dir_env);
    REQUIRE(g.code == cli::ok);
    CHECK(fs::exists(env_dir / "manifest.csv"));
    CHECK(cli::default_out_dir() == fs::path(cli::default_out_dir_name));

    CHECK(run({"--format-version", "2", "presets"}).code == cli::usage_error);
    CHECK(run({"presets", "--format-version", "1"}).code == cli::ok);
    CHECK(run({}).code == cli::usage_error);
    CHECK(run({"frobnicate"}).code == cli::usage_error);
    const auto help = run({"--help"});
    CHECK(help.code == cli::ok);
    CHECK(help.out.find("generate") != std::string::npos);
    CHECK(cli::height_tag(4.0) == "h4");
    CHECK(cli::height_tag(12.5) == "h12p5");
    fs::remove_all(dir);
}
