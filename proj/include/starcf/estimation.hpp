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

#include <Eigen/Dense>

#include "starcf/config.hpp"
#include "starcf/random.hpp"
#include "starcf/scenario.hpp"
#include "starcf/star_ris.hpp"

namespace starcf
{

/// Linear MMSE estimation statistics per (AP, user).
///   z_bar(m,k)      = sqrt(tau_p p_p xi_k) Delta_mk / S_mk
///   z(m,k)          = sqrt(tau_p p_p xi_k) Delta_mk z_bar(m,k)     (estimate variance per entry)
///   received(m,k)   = S_mk = sum_{j in P_k} tau_p p_p xi_j Delta_mj + sigma^2
struct EstimationStatistics
{
    Eigen::MatrixXd z_bar;
    Eigen::MatrixXd z;
    Eigen::MatrixXd received;
    Eigen::VectorXd pilot_coeff; // xi_k
    int pilot_length = 0;
    double pilot_power = 0.0;
    PilotAssignment pilots;

    int num_aps() const { return int(z.rows()); }
    int num_users() const { return int(z.cols()); }
    /// tau_p p_p xi_k
    double pilot_gain(int k) const { return pilot_length * pilot_power * pilot_coeff[k]; }
};

EstimationStatistics estimation_stats(const ChannelStatistics &stats, const SystemConfig &config,
                                      const PilotAssignment &pilots);

/// Despread pilot observation for every (m, k) followed by g_hat = z_bar * y.
/// The despread noise (Phi_k^T (x) I) vec(N) is white with covariance sigma^2 I,
/// so it is drawn directly per (AP, pilot group); users sharing a pilot see the
/// same observation.
ChannelRealization simulate_pilot_estimation(const ChannelRealization &channel, const EstimationStatistics &est,
                                             double noise_power, Rng &rng);

} // namespace starcf
