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

// Height sweep for one preset: mean cluster count, delay statistics and path loss versus UAV
// height, printed as a table.
//
//   uavuwb_demo [preset-key] [realizations-per-height] [seed]
//   uavuwb_demo suburban/s3/v0 500 7

#include "uavuwb/uavuwb.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char **argv)
{
    using namespace uavuwb;
    try
    {
        const std::string key = argc > 1 ? argv[1] : "open/s2/v0";
        const std::size_t n = argc > 2 ? std::stoul(argv[2]) : 500;
        const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 1;
        const auto &p = preset_lookup(key);
        const double d = 10.0;

        std::printf("preset %s, d = %.1f m, %zu CIRs per height, seed %llu\n", p.key().c_str(), d, n,
                    static_cast<unsigned long long>(seed));
        std::printf("%8s %10s %12s %12s %12s %12s\n", "h (m)", "clusters", "t_mean (ns)", "t_rms (ns)", "CB (MHz)",
                    "PL (dB)");

        std::uint64_t stream = 0;
        for (double h : {2.0, 4.0, 8.0, 12.0, 16.0, 24.0})
        {
            const Geometry geom = p.geometry(d, h);
            double clusters = 0.0, t_mean = 0.0, t_rms = 0.0;
            for (std::size_t i = 0; i < n; ++i, ++stream)
            {
                RandomSource rng(seed, stream);
                const Cir c = generate_cir(p, geom, rng);
                int max_label = 0;
                for (const auto &t : c.taps)
                    max_label = std::max(max_label, t.cluster);
                clusters += max_label + 1;
                const auto s = delay_stats(sparse_pdp(c));
                t_mean += s.t_mean;
                t_rms += s.t_rms;
            }
            const double k = static_cast<double>(n);
            const double cb = coherence_bandwidth_hz(t_rms / k);
            std::printf("%8.1f %10.3f %12.4f %12.4f %12.1f %12.3f\n", h, clusters / k, t_mean / k, t_rms / k,
                        cb / 1e6, path_loss_static(geom, p.pl));
        }
        std::printf("(CB from the mean RMS delay spread; PL without shadowing)\n");
        return 0;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
