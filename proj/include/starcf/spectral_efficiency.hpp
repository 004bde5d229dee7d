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

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "starcf/config.hpp"
#include "starcf/estimation.hpp"
#include "starcf/random.hpp"
#include "starcf/scenario.hpp"
#include "starcf/star_ris.hpp"

namespace starcf
{

/// Downlink SE of every user under conjugate beamforming and linear MMSE
/// detection. Per-stream quantities are K x N_u; the closed form is stream
/// symmetric, so each row is constant.
struct SeReport
{
    Eigen::MatrixXd d_bar; // coherent gain D_kn
    Eigen::MatrixXd c_bar; // second moment C_kn (signal plus interference)
    Eigen::MatrixXd sinr;
    Eigen::VectorXd se_per_user; // sum over streams of log2(1 + SINR), no prelog
    double noise_power = 0.0;
    double prelog = 1.0;
    double sum_se = 0.0; // prelog * sum_k SE_k
    double avg_se = 0.0; // sum_se / K
};

/// Largest per-AP excess of sum_k eta_mk z_mk N_ap N_u over p_d, in units of
/// p_d / (N_ap N_u) (i.e. of sum_k zeta_mk^2). Non-positive when feasible.
double power_constraint_excess(const Eigen::MatrixXd &eta, const EstimationStatistics &est,
                               const SystemConfig &config);

/// Closed-form SE. Throws std::invalid_argument on a negative eta or when the
/// per-AP power constraint is exceeded by more than 1e-9.
SeReport closed_form_se(const EstimationStatistics &est, const ChannelStatistics &chan, const Eigen::MatrixXd &eta,
                        const SystemConfig &config);

/// MMSE-SIC SE per user, log2 det(I + D^H Sigma^{-1} D), assembled from the
/// report's per-stream D and C as explicit N_u x N_u matrices.
Eigen::VectorXd mmse_sic_se(const SeReport &report);

/// (sum SE, average SE) with the (tau_c - tau_p)/tau_c prelog.
std::pair<double, double> network_se(const SeReport &report, const SystemConfig &config);

/// Sample moments of the quantities entering the SE expression.
struct MomentEstimate
{
    int trials = 0;
    int num_users = 0;
    std::vector<Eigen::MatrixXcd> mean_gain;    // E{G_mk^H w_mk}, AP-major (m * K + k)
    Eigen::MatrixXd gain_diag_stderr;           // M x K, std. error of the mean diagonal of G_mk^H w_mk
    std::vector<Eigen::MatrixXcd> D;            // per user: sum_m sqrt(eta_mk) E{G_mk^H w_mk}
    std::vector<Eigen::MatrixXcd> second_moment; // per user: sum_k' E{C_kk' C_kk'^H}
    Eigen::MatrixXd d_bar;                      // K x N_u, real diagonal of D_k
    Eigen::MatrixXd c_bar;                      // K x N_u, diagonal of second_moment
    Eigen::MatrixXd c_bar_stderr;               // K x N_u

    const Eigen::MatrixXcd &gain(int m, int k) const { return mean_gain[std::size_t(m) * num_users + k]; }
};

/// Per trial: sample channels, simulate pilot estimation, precode with
/// w_mk = G_hat_mk, and accumulate E{G^H w} and E{C C^H}.
MomentEstimate monte_carlo_moments(const Scenario &scenario, const StarRisState &ris, const EstimationStatistics &est,
                                   const Eigen::MatrixXd &eta, const SystemConfig &config, int trials, Rng &rng);

/// Linear MMSE detectors f_kn = Psi_k^{-1} d_kn with Psi_k = sum_k' E{C C^H} + sigma^2 I.
struct DetectorContext
{
    std::vector<Eigen::MatrixXcd> D;
    std::vector<Eigen::MatrixXcd> psi;
    std::vector<Eigen::MatrixXcd> detectors; // column n is f_kn
    double noise_power = 0.0;
};

DetectorContext assemble_detectors(const MomentEstimate &moments, double noise_power);

/// |f^H d|^2 / (f^H Psi f - |f^H d|^2) per (k, n).
Eigen::MatrixXd detector_sinr(const DetectorContext &ctx);

} // namespace starcf
