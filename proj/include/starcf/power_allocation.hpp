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

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "starcf/config.hpp"
#include "starcf/estimation.hpp"
#include "starcf/star_ris.hpp"

namespace starcf
{

/// Downlink power-control coefficients and their transformed form
/// zeta_mk = sqrt(eta_mk z_mk). Both are M x K.
struct PowerAllocation
{
    Eigen::MatrixXd eta;
    Eigen::MatrixXd zeta;

    static PowerAllocation from_eta(const Eigen::MatrixXd &eta, const EstimationStatistics &est);
    static PowerAllocation from_zeta(const Eigen::MatrixXd &zeta, const EstimationStatistics &est);
};

/// eta_mk = p_d / (K tr(Delta_hat_mk)); every AP spends exactly p_d.
PowerAllocation no_power_control(const EstimationStatistics &est, const SystemConfig &config);

/// Fractional power control with exponent alpha in [0, 1], scaled by p_d so
/// that every AP spends exactly p_d.
PowerAllocation fractional_power_control(const ChannelStatistics &chan, const EstimationStatistics &est,
                                         const SystemConfig &config, double alpha);

/// Quadratic-form coefficients of the SINR ratio A_kn(zeta) / B_kn(zeta).
///
/// Everything here is independent of the stream index n, so a single entry
/// serves all N_u streams of a user. Pair (k, j) is stored at k * K + j and
/// describes how zeta_j enters B_k.
struct FpCoefficients
{
    int num_aps = 0;
    int num_users = 0;
    int user_antennas = 0;
    double noise_power = 0.0;
    PilotAssignment pilots;
    Eigen::MatrixXd a;               // M x K, a_mk = sqrt(z_mk) N_ap
    std::vector<Eigen::VectorXd> k1; // diagonals
    std::vector<Eigen::VectorXd> k2; // diagonals
    std::vector<Eigen::MatrixXd> k3; // rank one
    std::vector<Eigen::MatrixXd> k4;

    std::size_t pair(int k, int j) const { return std::size_t(k) * num_users + j; }
    Eigen::MatrixXd K1(int k, int j) const { return k1[pair(k, j)].asDiagonal(); }
    Eigen::MatrixXd K2(int k, int j) const { return k2[pair(k, j)].asDiagonal(); }
    const Eigen::MatrixXd &K3(int k, int j) const { return k3[pair(k, j)]; }
    const Eigen::MatrixXd &K4(int k, int j) const { return k4[pair(k, j)]; }
};

FpCoefficients build_fp_coefficients(const ChannelStatistics &chan, const EstimationStatistics &est,
                                     const SystemConfig &config);

/// A_kn and B_kn for every user and stream (K x N_u).
struct RatioTerms
{
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
};

RatioTerms ratio_terms(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta);

/// gamma*_kn = A_kn / B_kn.
Eigen::MatrixXd update_gamma(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta);

/// varpi*_kn = sqrt((1 + gamma_kn) A_kn) / (A_kn + B_kn).
Eigen::MatrixXd update_varpi(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma);

/// sum_kn ln(1 + gamma) - gamma + (1 + gamma) A / (A + B). Natural log.
double evaluate_f1(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma);

/// sum_kn ln(1 + gamma) - gamma + 2 varpi sqrt(1 + gamma) a^T zeta_k - varpi^2 (A + B).
/// Equals evaluate_f1 when varpi is the optimal varpi for (zeta, gamma).
double evaluate_f2(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma,
                   const Eigen::MatrixXd &varpi);

/// sum_kn ln(1 + A/B): f1 at gamma = gamma*(zeta).
double sum_log_rate(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta);

/// Euclidean projection onto {q : |q|^2 <= radius2}.
Eigen::VectorXd project_ball(const Eigen::VectorXd &nu, double radius2);

/// The per-user ADMM system matrices
/// A_bar_k = sum varpi^2 (K1 + K3) over users sharing k's pilot
///         + sum varpi^2 (K2 + K4) over all users + penalty/2 I.
std::vector<Eigen::MatrixXd> admm_system_matrices(const FpCoefficients &coeffs, const Eigen::MatrixXd &varpi,
                                                  double penalty);

/// sum_n varpi_kn sqrt(1 + gamma_kn) a_k for every k (M x K).
Eigen::MatrixXd admm_linear_terms(const FpCoefficients &coeffs, const Eigen::MatrixXd &gamma,
                                  const Eigen::MatrixXd &varpi);

struct AdmmResult
{
    Eigen::MatrixXd zeta; // the feasible copy q at exit
    int iterations = 0;
    double residual = 0.0;      // |zeta - q| / |zeta| at exit
    double dual_residual = 0.0; // |q^t - q^(t-1)| / |q^t| at exit
    bool hit_cap = false;
};

/// Inner ADMM for fixed (gamma, varpi). The system matrices are factored once
/// per call. q starts at `q0`, the scaled duals at zero. Throws
/// std::runtime_error if an iterate becomes non-finite.
AdmmResult admm_inner(const FpCoefficients &coeffs, const Eigen::MatrixXd &gamma, const Eigen::MatrixXd &varpi,
                      const Eigen::MatrixXd &q0, const SystemConfig &config);

struct FpDiagnostics
{
    std::vector<double> f1_history; // sum_kn ln(1 + SINR_kn) after each outer step, starting at the initializer
    std::vector<int> admm_iterations;
    std::vector<double> admm_residuals;
    int fp_iterations = 0;
    int admm_iterations_total = 0;
    int admm_cap_hits = 0;
    int rejected_steps = 0; // ADMM outputs that did not improve f2 and were discarded
    bool fp_cap_hit = false;
};

void to_json(nlohmann::json &j, const FpDiagnostics &d);

struct FpResult
{
    PowerAllocation allocation;
    FpDiagnostics diagnostics;
};

/// ADMM-based fractional programming sum-SE maximization, started from eta0.
/// Throws std::invalid_argument if eta0 is infeasible.
FpResult admm_fp_optimize(const EstimationStatistics &est, const ChannelStatistics &chan, const SystemConfig &config,
                          const PowerAllocation &eta0);

} // namespace starcf
