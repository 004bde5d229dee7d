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

#include "starcf/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace starcf
{

EstimationStatistics estimation_stats(const ChannelStatistics &stats, const SystemConfig &config,
                                      const PilotAssignment &pilots)
{
    const int M = stats.num_aps(), K = stats.num_users();
    if (int(pilots.group_of.size()) != K)
        throw std::invalid_argument("estimation_stats: pilot assignment does not cover all users");

    EstimationStatistics est;
    est.pilot_length = config.pilot_length;
    est.pilot_power = config.pilot_power;
    est.pilot_coeff = Eigen::VectorXd::Constant(K, config.pilot_coeff);
    est.pilots = pilots;
    est.z_bar.resize(M, K);
    est.z.resize(M, K);
    est.received.resize(M, K);

    for (int k = 0; k < K; ++k)
    {
        const double amp = std::sqrt(est.pilot_gain(k));
        for (int m = 0; m < M; ++m)
        {
            double s = config.noise_power;
            for (int j : pilots.sharing(k))
                s += est.pilot_gain(j) * stats.delta_bar(m, j);
            est.received(m, k) = s;
            est.z_bar(m, k) = amp * stats.delta_bar(m, k) / s;
            est.z(m, k) = amp * stats.delta_bar(m, k) * est.z_bar(m, k);
        }
    }
    return est;
}

ChannelRealization simulate_pilot_estimation(const ChannelRealization &channel, const EstimationStatistics &est,
                                             double noise_power, Rng &rng)
{
    const int M = channel.num_aps, K = channel.num_users;
    const auto &groups = est.pilots.groups;
    const double noise_std = std::sqrt(noise_power);

    ChannelRealization out;
    out.num_aps = M;
    out.num_users = K;
    out.G.resize(channel.G.size());
    for (int m = 0; m < M; ++m)
    {
        for (const auto &group : groups)
        {
            const auto &ref = channel.at(m, group.front());
            Eigen::MatrixXcd y = noise_std * complex_normal_matrix(rng, ref.rows(), ref.cols());
            for (int j : group)
                y += std::sqrt(est.pilot_gain(j)) * channel.at(m, j);
            for (int k : group)
                out.at(m, k) = est.z_bar(m, k) * y;
        }
    }
    return out;
}

} // namespace starcf
