// SPDX-License-Identifier: Apache-2.0
//
// starcf: downlink simulation and power allocation for STAR-RIS-assisted
// cell-free massive MIMO with multi-antenna users.
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

#include <cstdint>

#include <Eigen/Dense>

#include "starcf/config.hpp"
#include "starcf/estimation.hpp"
#include "starcf/random.hpp"
#include "starcf/scenario.hpp"
#include "starcf/star_ris.hpp"

namespace starcf::testing
{

/// Everything derived from one (config, seed) drop.
struct Instance
{
    SystemConfig config;
    Scenario scenario;
    StarRisState ris;
    ChannelStatistics chan;
    EstimationStatistics est;
};

inline Instance make_instance(const SystemConfig &config, std::uint64_t seed)
{
    Instance in;
    in.config = config;
    in.scenario = generate_scenario(config, seed);
    in.ris = default_star_ris(config, seed);
    in.chan = channel_covariance(in.scenario, in.ris);
    in.est = estimation_stats(in.chan, config, in.scenario.pilots);
    return in;
}

inline SystemConfig small_config(int M = 4, int K = 4, int Nu = 2, int side = 4)
{
    SystemConfig c;
    c.num_aps = M;
    c.num_users = K;
    c.num_reflect_users = K / 2;
    c.num_transmit_users = K - K / 2;
    c.user_antennas = Nu;
    c.ris_cols = c.ris_rows = side;
    c.apply_pilot_rule();
    return c;
}

/// Random eta with each AP spending a random fraction of its budget.
inline Eigen::MatrixXd random_feasible_eta(const Instance &in, Rng &rng)
{
    const int M = in.est.num_aps(), K = in.est.num_users();
    const double budget = in.config.downlink_power / (in.config.ap_antennas * in.config.user_antennas);
    Eigen::MatrixXd eta(M, K);
    for (int m = 0; m < M; ++m)
    {
        Eigen::VectorXd w(K);
        for (int k = 0; k < K; ++k)
            w[k] = uniform01(rng) + 1e-3;
        const double fill = uniform(rng, 0.2, 1.0);
        // sum_k eta z = fill * budget
        const double spend = w.dot(in.est.z.row(m).transpose());
        for (int k = 0; k < K; ++k)
            eta(m, k) = fill * budget * w[k] / spend;
    }
    return eta;
}

} // namespace starcf::testing
